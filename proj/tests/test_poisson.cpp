#include <gtest/gtest.h>

#include "rieszlab/poisson.hpp"
#include "rieszlab/probes.hpp"
#include "rieszlab/riesz.hpp"

using namespace rieszlab;

namespace {

ScalarField<double> gaussian(const Grid<double>& g, double width) {
  return ScalarField<double>::from_function(g, [&](const std::vector<double>& x) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    return std::complex<double>(std::exp(-r2 / (2 * width * width)), 0);
  });
}

}  // namespace

TEST(Kernel, MeasuresOfBallAndSphere) {
  EXPECT_NEAR(sphere_measure(1), 2.0, 1e-14);
  EXPECT_NEAR(sphere_measure(2), 2 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_measure(3), 4 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(ball_volume(2), std::numbers::pi, 1e-14);
  EXPECT_NEAR(ball_volume(3), 4 * std::numbers::pi / 3, 1e-13);
}

TEST(Kernel, NormalizerMatchesGammaFormula) {
  for (int n = 1; n <= 4; ++n) {
    const PoissonKernel<double> k(n);
    const double closed = std::tgamma((n + 1) / 2.0) / std::pow(std::numbers::pi, (n + 1) / 2.0);
    EXPECT_NEAR(k.normalizer(), closed, 1e-11 * closed) << "n = " << n;
  }
  EXPECT_NEAR(PoissonKernel<double>(1).normalizer(), 1 / std::numbers::pi, 1e-12);
}

TEST(Semigroup, SpectralExtensionComposes) {
  const Grid<double> g(2, 32, 8.0);
  const auto f = gaussian(g, 0.7);
  const auto a = poisson_extend(poisson_extend(f, 0.3), 0.5);
  const auto b = poisson_extend(f, 0.8);
  EXPECT_LT((a.samples() - b.samples()).abs().maxCoeff(), 1e-13);
}

TEST(Semigroup, TimeDerivativeMatchesDifferenceQuotient) {
  const Grid<double> g(1, 64, 8.0);
  const auto f = gaussian(g, 0.5);
  const double t = 0.4, h = 1e-4;
  const auto exact = poisson_derivative_t(f, t);
  const auto fd = (1 / (2 * h)) * (poisson_extend(f, t + h) - poisson_extend(f, t - h));
  EXPECT_LT((exact.samples() - fd.samples()).abs().maxCoeff(), 1e-7);
}

TEST(Semigroup, KernelRouteMatchesSpectralRoute) {
  const Grid<double> g(2, 64, 16.0);
  const auto f = gaussian(g, 1.0);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto spectral = poisson_extend(f, t);
    const auto kernel = poisson_extend_kernel(f, t, 2);
    const double scale = spectral.samples().abs().maxCoeff();
    EXPECT_LT((spectral.samples() - kernel.samples()).abs().maxCoeff(), 3e-4 * scale) << "t = " << t;
  }
}

TEST(Semigroup, KernelRouteOffGridAgreesAtNodes) {
  const Grid<double> g(2, 16, 6.0);
  const auto f = gaussian(g, 0.8);
  const auto bulk = poisson_extend_kernel(f, 0.6);
  const RealArray<double> values = f.samples().real();
  for (std::size_t i : {0ul, 37ul, 200ul}) {
    const auto x = g.position(i);
    EXPECT_NEAR(poisson_kernel_value_at(g, values, std::span<const double>(x), 0.6), bulk.samples()[i].real(), 1e-12);
  }
}

TEST(Semigroup, KernelTailMass) {
  for (int n : {1, 2, 3}) {
    const PoissonKernel<double> k(n);
    const double t = 0.7, a = 3.0;
    // direct mass of the cube by nested quadrature for n <= 2; ball bounds for n = 3
    const double tail = detail::kernel_tail_mass(k, t, a);
    if (n == 1) {
      const double inside = integrate<double>([&](double y) { return k(t, y); }, -a, a, 1e-13).value;
      EXPECT_NEAR(tail, 1 - inside, 1e-12);
    } else if (n == 2) {
      auto row = [&](double y) {
        return integrate<double>([&](double x) { return k(t, std::hypot(x, y)); }, -a, a, 1e-13).value;
      };
      EXPECT_NEAR(tail, 1 - integrate<double>(row, -a, a, 1e-12).value, 1e-10);
    } else {
      auto outside_ball = [&](double r) {
        auto radial = [&](double rho) { return sphere_measure(3) * rho * rho * k(t, rho); };
        return integrate_to_infinity<double>(radial, r, 1e-12).value;
      };
      EXPECT_LT(tail, outside_ball(a));
      EXPECT_GT(tail, outside_ball(a * std::sqrt(3.0)));
    }
  }
}

TEST(Semigroup, KernelRoutePreservesConstants) {
  const Grid<double> g(2, 32, 8.0);
  const auto one = ScalarField<double>::from_function(g, [](const std::vector<double>&) { return 1.0; });
  const auto out = poisson_extend_kernel(one, 0.7);
  EXPECT_LT((out.samples() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(PowerWeight, ConvergenceRange) {
  EXPECT_TRUE(power_weight_extension_converges(0.5, 2));
  EXPECT_TRUE(power_weight_extension_converges(-1.5, 2));
  EXPECT_FALSE(power_weight_extension_converges(1.0, 2));
  EXPECT_FALSE(power_weight_extension_converges(-2.0, 2));
  EXPECT_THROW(power_weight_extension(1.5, 2, 0.0, 1.0), DivergenceError);
}

// On the line, P_t |x|^alpha (0) = t^alpha / cos(pi alpha / 2).
TEST(PowerWeight, OneDimensionalClosedForm) {
  for (double alpha : {-0.75, -0.3, 0.0, 0.4, 0.8}) {
    const double t = 1.7;
    const double expected = std::pow(t, alpha) / std::cos(std::numbers::pi * alpha / 2);
    EXPECT_NEAR(power_weight_extension(alpha, 1, 0.0, t), expected, 1e-8 * expected) << alpha;
  }
}

TEST(PowerWeight, ScalingAndConstant) {
  EXPECT_NEAR(power_weight_extension(0.0, 2, 1.3, 0.4), 1.0, 1e-9);
  const double a = power_weight_extension(0.5, 2, 1.0, 1.0);
  const double b = power_weight_extension(0.5, 2, 3.0, 3.0);
  EXPECT_NEAR(b, std::pow(3.0, 0.5) * a, 1e-8 * b);
}

// Direct 2-D quadrature of the kernel against |y|^alpha at an off-centre point.
TEST(PowerWeight, OffCentreMatchesPolarQuadrature) {
  const double alpha = 0.5, t = 0.8, d = 1.1;
  const PoissonKernel<double> k(2);
  auto radial = [&](double rho) {
    auto angular = [&](double phi) {
      const double dx = rho * std::cos(phi) - d, dy = rho * std::sin(phi);
      return k(t, std::hypot(dx, dy));
    };
    return std::pow(rho, alpha + 1) * integrate<double>(angular, 0.0, 2 * std::numbers::pi, 1e-12).value;
  };
  const double head = integrate<double>(radial, 0.0, 4.0, 1e-11).value;
  const double tail = integrate_to_infinity<double>(radial, 4.0, 1e-11).value;
  EXPECT_NEAR(power_weight_extension(alpha, 2, d, t), head + tail, 1e-7 * (head + tail));
}

TEST(Shells, DivergentGrowthRatio) {
  const auto table = radial_divergence_analysis(1.5, 2, 1.0, 40);
  EXPECT_TRUE(table.diverged);
  EXPECT_NEAR(table.growth_ratio_estimate, std::sqrt(2.0), 0.01);
}

TEST(Shells, ConvergentTotalMatchesDirectIntegral) {
  const auto table = radial_divergence_analysis(0.5, 2, 1.0, 40);
  EXPECT_FALSE(table.diverged);
  EXPECT_NEAR(table.growth_ratio_estimate, std::sqrt(0.5), 0.01);
  EXPECT_NEAR(table.total, power_weight_extension(0.5, 2, 0.0, 1.0), 1e-6);
}

TEST(Shells, RejectsBadInput) {
  EXPECT_THROW(radial_divergence_analysis(-2.5, 2, 1.0, 20), ConfigError);
  EXPECT_THROW(radial_divergence_analysis(0.5, 2, 0.0, 20), ConfigError);
  EXPECT_THROW(radial_divergence_analysis(0.5, 2, 1.0, 4), ConfigError);
}

TEST(LogTime, WeightsIntegrateOneOverT) {
  const LogTimeGrid<double> q{1e-2, 1e2, 401};
  const auto t = q.nodes();
  const auto w = q.weights();
  double sum = 0;
  for (std::size_t j = 0; j < t.size(); ++j) sum += w[j] / t[j];
  EXPECT_NEAR(sum, std::log(1e4), 1e-12);
  EXPECT_NEAR(t.front(), 1e-2, 1e-16);
  EXPECT_NEAR(t.back(), 1e2, 1e-12);
}

TEST(SemigroupIdentity, LocalizedFieldsOnSmallGrid) {
  const Grid<double> g(2, 64, 16.0);
  const auto f = remove_mean(localized_bump_field(g, 11, 0));
  const VectorField<double> h({localized_bump_field(g, 11, 1), localized_bump_field(g, 11, 2)});
  const auto r = semigroup_identity_check(f, h, LogTimeGrid<double>{1e-3, 1e2, 200},
                                          [](const ScalarField<double>& v) { return riesz_apply(v); });
  EXPECT_LT(r.relative_error, 1e-3);
  EXPECT_GT(r.truncation_estimate, 0.0);
}

TEST(SemigroupIdentity, RequiresMeanZero) {
  const Grid<double> g(1, 16, 4.0);
  const auto f = gaussian(g, 0.5);
  const VectorField<double> h({f});
  EXPECT_THROW(semigroup_identity_check(f, h, LogTimeGrid<double>{},
                                        [](const ScalarField<double>& v) { return riesz_apply(v); }),
               ConfigError);
}
