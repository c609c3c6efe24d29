#include <gtest/gtest.h>

#include "rieszlab/poisson.hpp"
#include "rieszlab/quadrature.hpp"
#include "rieszlab/weight_spec.hpp"
#include "rieszlab/weights.hpp"

using namespace rieszlab;

namespace {

// (1 / |B|) over B(c, r) in polar coordinates about c, by nested quadrature.
double polar_ball_average_2d(double alpha, double cx, double cy, double r) {
  auto radial = [&](double rho) {
    auto angular = [&](double phi) {
      return std::pow(std::hypot(cx + rho * std::cos(phi), cy + rho * std::sin(phi)), alpha);
    };
    return rho * integrate<double>(angular, 0.0, 2 * std::numbers::pi, 1e-12).value;
  };
  return integrate<double>(radial, 0.0, r, 1e-11).value / (std::numbers::pi * r * r);
}

}  // namespace

TEST(BallAverage, ConstantWeight) {
  const auto avg = ball_average(ConstantWeight{2.5}, Ball{{0.3, -0.2}, 0.7});
  EXPECT_DOUBLE_EQ(avg.value, 2.5);
}

TEST(BallAverage, CentredPowerWeight) {
  for (int n : {1, 2, 3}) {
    for (double alpha : {-0.6, 0.5, 1.5}) {
      const double r = 1.7;
      const double expected = n * std::pow(r, alpha) / (alpha + n);
      const auto avg = ball_average(PowerWeight{alpha, n}, Ball{std::vector<double>(n, 0.0), r});
      EXPECT_NEAR(avg.value, expected, 1e-9 * expected) << "n=" << n << " alpha=" << alpha;
    }
  }
}

TEST(BallAverage, OffCentrePowerWeightOnLine) {
  const double alpha = -0.4, c = 0.3, r = 1.0;
  const double expected = (std::pow(c + r, alpha + 1) + std::pow(r - c, alpha + 1)) / ((alpha + 1) * 2 * r);
  EXPECT_NEAR(ball_average(PowerWeight{alpha, 1}, Ball{{c}, r}).value, expected, 1e-12);
  const double far = (std::pow(3.0, 2.5) - std::pow(1.0, 2.5)) / (2.5 * 2);
  EXPECT_NEAR(ball_average(PowerWeight{1.5, 1}, Ball{{2.0}, 1.0}).value, far, 1e-12);
}

TEST(BallAverage, OffCentrePowerWeightInPlane) {
  for (double alpha : {-1.2, 0.7, 2.0}) {
    const double expected = polar_ball_average_2d(alpha, 0.9, 0.4, 0.6);
    const auto avg = ball_average(PowerWeight{alpha, 2}, Ball{{0.9, 0.4}, 0.6});
    EXPECT_NEAR(avg.value, expected, 1e-8 * expected) << alpha;
  }
  // ball containing the origin off-centre
  const double expected = polar_ball_average_2d(-1.2, 0.3, 0.1, 1.0);
  EXPECT_NEAR(ball_average(PowerWeight{-1.2, 2}, Ball{{0.3, 0.1}, 1.0}).value, expected, 1e-6 * expected);
}

TEST(BallAverage, NonIntegrablePowerIsRejected) {
  EXPECT_THROW(ball_average(PowerWeight{-2.0, 2}, Ball{{0.1, 0.0}, 1.0}), DivergenceError);
  EXPECT_NO_THROW(ball_average(PowerWeight{-2.0, 2}, Ball{{3.0, 0.0}, 1.0}));
}

TEST(BallAverage, StepWeightCaps) {
  const StepWeight w{1.0, 5.0, 0, 2};
  EXPECT_NEAR(ball_average(w, Ball{{0.0, 0.4}, 1.0}).value, 3.0, 1e-12);
  EXPECT_NEAR(ball_average(w, Ball{{-2.0, 0.0}, 1.0}).value, 1.0, 1e-12);
  // half-width cap: area fraction (pi/3 - sqrt(3)/4) / pi on the right
  const double frac = (std::numbers::pi / 3 - std::sqrt(3.0) / 4) / std::numbers::pi;
  EXPECT_NEAR(ball_average(w, Ball{{-0.5, 0.0}, 1.0}).value, 1.0 + 4.0 * frac, 1e-10);
  const StepWeight line{2.0, 4.0, 0, 1};
  EXPECT_NEAR(ball_average(line, Ball{{0.5}, 1.0}).value, 0.25 * 2 + 0.75 * 4, 1e-12);
}

TEST(BallAverage, SampledConstant) {
  const Grid<double> g(2, 16, 4.0);
  const auto w = sample_on_grid(ConstantWeight{0.7}, g);
  EXPECT_NEAR(ball_average(w, Ball{{1.9, -1.9}, 0.6}).value, 0.7, 1e-14);
  EXPECT_NEAR(ball_average(w, Ball{{0.0, 0.0}, 0.01}).value, 0.7, 1e-14);
}

TEST(PoissonValue, StepWeightOnLineAndPlane) {
  const StepWeight line{1.0, 3.0, 0, 1};
  const double x = 0.4, t = 0.9;
  const PoissonKernel<double> k(1);
  auto integrand = [&](double y) { return k(t, x - y); };
  const double left = integrate_to_infinity<double>([&](double s) { return integrand(-s); }, 0.0, 1e-12).value;
  const double right = integrate_to_infinity<double>(integrand, 0.0, 1e-12).value;
  const double expected = 1.0 * left + 3.0 * right;
  const std::vector<double> p1{x};
  EXPECT_NEAR(poisson_value(line, p1, t), expected, 1e-10);
  const StepWeight plane{1.0, 3.0, 0, 2};
  const std::vector<double> p2{x, -5.0};
  EXPECT_NEAR(poisson_value(plane, p2, t), expected, 1e-10);
}

TEST(PoissonValue, PowerWeightRoute) {
  const std::vector<double> x{0.0};
  EXPECT_NEAR(poisson_value(PowerWeight{0.5, 1}, x, 2.0), std::sqrt(2.0) * std::sqrt(2.0), 1e-8);
  EXPECT_THROW(poisson_value(PowerWeight{1.0, 1}, x, 1.0), DivergenceError);
}

TEST(PoissonValue, SampledConstant) {
  const Grid<double> g(2, 16, 4.0);
  const auto w = sample_on_grid(ConstantWeight{1.3}, g);
  const std::vector<double> x{0.11, -0.3};
  EXPECT_NEAR(poisson_value(w, x, 0.5), 1.3, 1e-12);
}

TEST(Sampling, HalfSpacingShift) {
  const Grid<double> g(1, 8, 4.0);
  const auto w = sample_on_grid(PowerWeight{1.0, 1}, g);
  for (int j = 0; j < 8; ++j) EXPECT_NEAR(w.values[j], std::abs(g.coordinate(j) + 0.25), 1e-15);
}

TEST(Sampling, MollifiedPowerWeight) {
  const Grid<double> g(2, 32, 8.0);
  const auto w = sample_power_weight(-1.5, g);
  ASSERT_TRUE(w.mollification.has_value());
  EXPECT_DOUBLE_EQ(w.mollification->floor, g.spacing() / 2);
  EXPECT_DOUBLE_EQ(w.mollification->cap, 2.0);
  EXPECT_EQ(w.source, "mollified-power:-1.5");
  EXPECT_TRUE((w.values > 0).all());
  EXPECT_LE(w.values.maxCoeff(), std::pow(g.spacing() / 2, -1.5) * (1 + 1e-12));
  EXPECT_GE(w.values.minCoeff(), std::pow(2.0, -1.5) * (1 - 1e-12));
}

TEST(Sampling, StepWeightIsPeriodicAndPositive) {
  const Grid<double> g(1, 64, 8.0);
  const auto w = sample_step_weight(1.0, 4.0, 0, g, 0.2);
  EXPECT_TRUE((w.values > 0).all());
  EXPECT_NEAR(w.values[16], 1.0, 1e-4);
  EXPECT_NEAR(w.values[48], 4.0, 1e-4);
}

TEST(Transforms, PowerScaleEvaluate) {
  const PowerWeight w{0.5, 2, 2.0};
  const std::vector<double> x{3.0, 4.0};
  EXPECT_NEAR(evaluate(w, x), 2.0 * std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(evaluate(power(w, -2.0), x), 1 / (4.0 * 5.0), 1e-14);
  EXPECT_NEAR(evaluate(scale(w, 3.0), x), 6.0 * std::sqrt(5.0), 1e-14);
  EXPECT_THROW(scale(w, 0.0), ConfigError);
  EXPECT_NEAR(evaluate(power(StepWeight{2.0, 8.0, 0, 2}, 1.0 / 3), x), 2.0, 1e-14);
}

TEST(Transforms, Describe) {
  EXPECT_EQ(describe(ConstantWeight{1.0}), "const:1");
  EXPECT_EQ(describe(PowerWeight{0.5, 2}), "power:0.5@n2");
  EXPECT_EQ(weight_dim(ConstantWeight{}, 3), 3);
  EXPECT_EQ(weight_dim(PowerWeight{0.5, 2}, 3), 2);
}

TEST(WeightSpec, ParsesEveryKind) {
  EXPECT_DOUBLE_EQ(std::get<ConstantWeight>(parse_weight_spec("const:2.5", 2)).value, 2.5);
  const auto p = std::get<PowerWeight>(parse_weight_spec("power:-0.5", 3));
  EXPECT_DOUBLE_EQ(p.alpha, -0.5);
  EXPECT_EQ(p.dim, 3);
  const auto s = std::get<StepWeight>(parse_weight_spec("step:1,4,1", 2));
  EXPECT_DOUBLE_EQ(s.right, 4.0);
  EXPECT_EQ(s.axis, 1);
  EXPECT_EQ(std::get<StepWeight>(parse_weight_spec("step:1,4", 2)).axis, 0);
}

TEST(WeightSpec, RejectsMalformedSpecs) {
  for (const char* bad : {"", "power", "power:", "power:abc", "const:0", "const:-1", "step:1", "step:1,0",
                          "step:1,2,2", "step:1,2,0.5", "gauss:1", "sampled:", "sampled:/nonexistent/file"}) {
    EXPECT_THROW(parse_weight_spec(bad, 2), ConfigError) << bad;
  }
}
