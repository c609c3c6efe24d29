#include <gtest/gtest.h>

#include <random>

#include "rieszlab/fields.hpp"
#include "rieszlab/random.hpp"

using namespace rieszlab;

namespace {

ScalarField<double> random_field(const Grid<double>& g, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> normal;
  ComplexArray<double> s(g.point_count());
  for (auto& v : s) v = {normal(rng), normal(rng)};
  return ScalarField<double>(g, s);
}

}  // namespace

TEST(Grid, CoordinatesAndFrequencies) {
  const Grid<double> g(2, 8, 4.0);
  EXPECT_EQ(g.point_count(), 64u);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.coordinate(0), -2.0);
  EXPECT_DOUBLE_EQ(g.coordinate(7), 1.5);
  EXPECT_EQ(g.frequency(4), 4);
  EXPECT_EQ(g.frequency(5), -3);
  EXPECT_EQ(g.index(9, 0), 1);
  EXPECT_EQ(g.index(9, 1), 1);
  const auto x = g.position(9);
  EXPECT_DOUBLE_EQ(x[0], -1.5);
  EXPECT_DOUBLE_EQ(x[1], -1.5);
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(Grid<double>(0, 8, 1.0), ConfigError);
  EXPECT_THROW(Grid<double>(1, 0, 1.0), ConfigError);
  EXPECT_THROW(Grid<double>(1, 7, 1.0), ConfigError);
  EXPECT_THROW(Grid<double>(1, 8, -1.0), ConfigError);
}

TEST(Fourier, RoundTrip) {
  const Grid<double> g(2, 16, 3.0);
  const auto f = random_field(g, 1);
  const auto back = inverse_transform(forward_transform(f));
  EXPECT_LT((back.samples() - f.samples()).abs().maxCoeff(), 1e-12);
}

TEST(Fourier, ConstantMapsToZeroMode) {
  const Grid<double> g(1, 16, 2.0);
  const auto f = ScalarField<double>::from_function(g, [](const std::vector<double>&) { return std::complex<double>(3.0, -1.0); });
  const auto c = forward_transform(f).coefficients();
  EXPECT_NEAR(std::abs(c[0] - std::complex<double>(3.0, -1.0)), 0.0, 1e-14);
  EXPECT_LT(c.tail(15).abs().maxCoeff(), 1e-14);
}

TEST(Fourier, PlaneWaveLandsOnItsFrequency) {
  const Grid<double> g(1, 32, 5.0);
  const double xi = 2 * std::numbers::pi * 3 / 5.0;
  const auto f = ScalarField<double>::from_function(g, [&](const std::vector<double>& x) {
    return std::exp(std::complex<double>(0, xi * (x[0] + 2.5)));
  });
  const auto c = forward_transform(f).coefficients();
  EXPECT_NEAR(std::abs(c[3]), 1.0, 1e-13);
  EXPECT_NEAR(c.abs2().sum(), 1.0, 1e-12);
}

TEST(Fourier, Parseval) {
  const Grid<double> g(2, 8, 6.0);
  const auto f = random_field(g, 2);
  const auto h = random_field(g, 3);
  const auto direct = inner_product(f, h);
  const auto spectral = spectral_inner_product(forward_transform(f), forward_transform(h));
  EXPECT_NEAR(std::abs(direct - spectral), 0.0, 1e-10 * std::abs(direct));
}

TEST(Fields, InnerProductUsesCellVolume) {
  const Grid<double> g(2, 4, 2.0);
  const auto one = ScalarField<double>::from_function(g, [](const std::vector<double>&) { return 1.0; });
  EXPECT_NEAR(inner_product(one, one).real(), 4.0, 1e-14);
  EXPECT_NEAR(norm(one), 2.0, 1e-14);
}

TEST(Fields, IdentityMultiplier) {
  const Grid<double> g(3, 4, 1.0);
  const auto f = random_field(g, 4);
  const auto out = apply_multiplier(Multiplier<double>::identity(g), f);
  EXPECT_LT((out.samples() - f.samples()).abs().maxCoeff(), 1e-13);
}

TEST(Fields, RemoveMean) {
  const Grid<double> g(2, 8, 1.0);
  const auto f = remove_mean(random_field(g, 5));
  EXPECT_LT(std::abs(f.samples().mean()), 1e-14);
}

TEST(Fields, GridMismatchIsRejected) {
  const auto a = random_field(Grid<double>(1, 8, 1.0), 6);
  const auto b = random_field(Grid<double>(1, 8, 2.0), 7);
  EXPECT_THROW(inner_product(a, b), ConfigError);
  EXPECT_THROW(ScalarField<double>(Grid<double>(1, 8, 1.0), ComplexArray<double>::Zero(7)), ConfigError);
}

TEST(Fields, WeightedNormRequiresPositiveWeight) {
  const Grid<double> g(1, 8, 1.0);
  const auto f = random_field(g, 8);
  RealArray<double> w = RealArray<double>::Ones(8);
  EXPECT_NEAR(weighted_norm(f, w), norm(f), 1e-14);
  w[3] = 0;
  EXPECT_THROW(weighted_norm(f, w), ConfigError);
}
