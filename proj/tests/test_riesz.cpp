#include <gtest/gtest.h>

#include <random>

#include "rieszlab/riesz.hpp"
#include "rieszlab/weights.hpp"

using namespace rieszlab;

namespace {

ScalarField<double> random_mean_zero(const Grid<double>& g, std::uint64_t seed) {
  return ScalarField<double>(g, random_mean_zero_start<double>(g.point_count(), seed));
}

}  // namespace

TEST(Riesz, IsometryOnMeanZeroFields) {
  const Grid<double> g(2, 32, 7.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = random_mean_zero(g, seed);
    EXPECT_NEAR(norm(riesz_apply(f)), norm(f), 1e-12 * norm(f));
  }
}

TEST(Riesz, SumOfSquaresIsMinusIdentity) {
  const Grid<double> g(3, 8, 2.0);
  const auto f = random_mean_zero(g, 9);
  const auto m = riesz_multipliers(g);
  ScalarField<double> acc(g);
  for (const auto& mk : m) acc += apply_multiplier(mk, apply_multiplier(mk, f));
  EXPECT_LT((acc.samples() + f.samples()).abs().maxCoeff(), 1e-12);
}

TEST(Riesz, AdjointPairing) {
  const Grid<double> g(2, 16, 5.0);
  const auto f = random_mean_zero(g, 3);
  const VectorField<double> h({random_mean_zero(g, 4), random_mean_zero(g, 5)});
  const auto lhs = inner_product(riesz_apply(f), h);
  const auto rhs = inner_product(f, riesz_adjoint_apply(h));
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12 * std::abs(lhs));
}

TEST(Riesz, SymbolAtZeroFrequencyVanishes) {
  const Grid<double> g(2, 8, 1.0);
  for (const auto& m : riesz_multipliers(g)) EXPECT_EQ(m.symbol()[0], std::complex<double>(0, 0));
}

// Symbol -i sign(xi) sends cos to sin.
TEST(Hilbert, CosineToSine) {
  const Grid<double> g(1, 64, 2 * std::numbers::pi);
  const auto f = ScalarField<double>::from_function(g, [](const std::vector<double>& x) { return std::cos(3 * x[0]); });
  const auto h = apply_multiplier(hilbert_multiplier(g), f);
  double err = 0;
  for (std::size_t i = 0; i < g.point_count(); ++i) {
    const double x = g.position(i)[0];
    err = std::max(err, std::abs(h.samples()[i] - std::complex<double>(std::sin(3 * x), 0)));
  }
  EXPECT_LT(err, 1e-12);
}

TEST(WeightedNorm, ConstantWeightGivesOne) {
  const Grid<double> g(2, 16, 4.0);
  const RealArray<double> w = RealArray<double>::Constant(g.point_count(), 3.5);
  const auto est = weighted_riesz_norm(w, g);
  EXPECT_TRUE(est.converged);
  EXPECT_NEAR(est.value, 1.0, 1e-12);
}

TEST(WeightedNorm, PowerIterationMatchesDenseSvd) {
  const Grid<double> g(2, 12, 8.0);
  const auto w = sample_power_weight(1.2, g);
  const auto it = weighted_riesz_norm(w.values, g, NormOptions<double>{1e-13, 20000, 5});
  const auto dense = dense_weighted_riesz_norm(w.values, g);
  EXPECT_TRUE(it.converged);
  EXPECT_NEAR(it.value, dense.value, 1e-6 * dense.value);
}

TEST(WeightedNorm, ScaleInvariant) {
  const Grid<double> g(2, 12, 8.0);
  const auto w = sample_power_weight(0.8, g);
  const auto a = dense_weighted_riesz_norm(w.values, g).value;
  const auto b = dense_weighted_riesz_norm<double>(w.values * 1e3, g).value;
  EXPECT_NEAR(a, b, 1e-10 * a);
  EXPECT_GE(a, 1.0 - 1e-12);
}

TEST(WeightedNorm, RejectsNonPositiveWeight) {
  const Grid<double> g(1, 8, 1.0);
  RealArray<double> w = RealArray<double>::Ones(8);
  w[2] = -1;
  EXPECT_THROW(weighted_riesz_norm(w, g), ConfigError);
}

TEST(WeightedNorm, BudgetExhaustionIsReported) {
  const Grid<double> g(2, 12, 8.0);
  const auto w = sample_power_weight(1.5, g);
  const auto est = weighted_riesz_norm(w.values, g, NormOptions<double>{1e-15, 2, 1});
  EXPECT_FALSE(est.converged);
  EXPECT_EQ(est.iterations, 2);
}
