#include <gtest/gtest.h>

#include "rieszlab/bellman.hpp"

using namespace rieszlab;

namespace {

BellmanPoint<double> sample_point() {
  BellmanPoint<double> p;
  p.X = 2.0;
  p.Y = 1.5;
  p.x = {0.6, -0.8};
  p.y.resize(2);
  p.y << std::complex<double>(0.3, 0.1), std::complex<double>(-0.2, 0.4);
  p.r = 0.8;
  p.s = 2.0;
  p.Q = 4.0;
  return p;
}

}  // namespace

TEST(Domain, Membership) {
  auto p = sample_point();
  const auto m = domain_membership(p);
  EXPECT_TRUE(m.inside);
  EXPECT_NEAR(m.x_margin, 2.0 * 2.0 - 1.0, 1e-14);
  EXPECT_NEAR(m.lower, 0.6, 1e-14);
  p.Q = 1.6;
  EXPECT_FALSE(domain_membership(p).inside);
}

TEST(Domain, RandomPointsAreInside) {
  auto rng = make_stream(1, 0);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_domain_point<double>(rng, 3, 2.5);
    EXPECT_TRUE(domain_membership(p).inside);
    EXPECT_EQ(p.y.size(), 3);
  }
  EXPECT_THROW(random_domain_point<double>(rng, 2, 1.0), ConfigError);
}

TEST(Candidate, SizeBoundsOnDomain) {
  auto rng = make_stream(2, 0);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_domain_point<double>(rng, 2, 10.0);
    ComplexVector<double> x(1);
    x[0] = p.x;
    const double bx = candidate_value(p.X, x, p.s);
    const double by = candidate_value(p.Y, p.y, p.r);
    EXPECT_GE(bx, 0.0);
    EXPECT_LE(bx, p.X);
    EXPECT_GE(by, 0.0);
    EXPECT_LE(by, p.Y);
  }
}

TEST(Candidate, HessianMatchesFiniteDifferences) {
  ComplexVector<double> x(2);
  x << std::complex<double>(0.5, -0.2), std::complex<double>(1.1, 0.3);
  const double X = 3.0, d = 0.7;
  const auto c = candidate_value_and_hessian(X, x, d);
  ASSERT_EQ(c.negative_hessian.rows(), 6);
  RealVector<double> p(6);
  p << X, 0.5, -0.2, 1.1, 0.3, d;
  auto f = [](const RealVector<double>& q) {
    ComplexVector<double> z(2);
    z << std::complex<double>(q[1], q[2]), std::complex<double>(q[3], q[4]);
    return candidate_value(q[0], z, q[5]);
  };
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      RealVector<double> a = RealVector<double>::Unit(6, i), b = RealVector<double>::Unit(6, j);
      // polarization: H(a, b) = (H(a+b) - H(a-b)) / 4
      const double plus = richardson_second_derivative<double>(f, p, a + b, 1e-2);
      const double minus = richardson_second_derivative<double>(f, p, a - b, 1e-2);
      EXPECT_NEAR(-(plus - minus) / 4, c.negative_hessian(i, j), 1e-7) << i << "," << j;
    }
  }
}

TEST(Candidate, FormMatchesSquareIdentity) {
  ComplexVector<double> x(1);
  x[0] = {0.4, 0.9};
  const auto c = candidate_value_and_hessian(1.0, x, 1.3);
  ComplexVector<double> dx(1);
  dx[0] = {-0.3, 0.2};
  const double dd = 0.7;
  RealVector<double> u(4);
  u << 0.5, dx[0].real(), dx[0].imag(), dd;
  EXPECT_NEAR(u.dot(c.negative_hessian * u), c.negative_form(0.5, dx, dd), 1e-14);
}

TEST(Candidate, DegenerateAlongScaling) {
  ComplexVector<double> x(1);
  x[0] = {0.4, 0.9};
  const double d = 1.3;
  const auto c = candidate_value_and_hessian(1.0, x, d);
  RealVector<double> u(4);
  const double dd = 0.37;
  u << 2.0, x[0].real() * dd / d, x[0].imag() * dd / d, dd;
  EXPECT_NEAR(u.dot(c.negative_hessian * u), 0.0, 1e-15);
  Eigen::SelfAdjointEigenSolver<RealMatrix<double>> es(c.negative_hessian);
  EXPECT_GE(es.eigenvalues()[0], -1e-14);
}

TEST(Candidate, RejectsNonPositiveDenominator) {
  ComplexVector<double> x(1);
  x[0] = 1.0;
  EXPECT_THROW(candidate_value_and_hessian(1.0, x, 0.0), ConfigError);
  EXPECT_THROW(candidate_value(1.0, x, -1.0), ConfigError);
}

TEST(Embedding, LayoutPlacesBlocks) {
  const auto p = sample_point();
  const BellmanLayout L{2};
  EXPECT_EQ(L.size(), 10);
  const auto hx = embed_x_candidate(p);
  const auto hy = embed_y_candidate(p);
  EXPECT_NEAR(hx(L.x_re(), L.x_re()), 2 / p.s, 1e-15);
  EXPECT_EQ(hx(L.r(), L.r()), 0.0);
  EXPECT_NEAR(hy(L.y_im(1), L.y_im(1)), 2 / p.r, 1e-15);
  EXPECT_EQ(hy(L.s(), L.s()), 0.0);
  EXPECT_EQ(hx.row(L.Y()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Concavity, DetectsMissingCrossCurvature) {
  const auto p = sample_point();
  const BellmanLayout L{2};
  RealMatrix<double> u = RealMatrix<double>::Zero(L.size(), 2);
  u(L.x_re(), 0) = 1.0;
  u(L.s(), 1) = 1.0;
  u(L.x_re(), 1) = p.x.real() / p.s;
  u(L.x_im(), 1) = p.x.imag() / p.s;
  u(L.y_re(0), 1) = 1.0;
  const auto ok = concavity_condition_check<double>(embed_x_candidate(p), u.leftCols(1), 2);
  EXPECT_GT(ok.worst_margin, 0.0);
  const auto bad = concavity_condition_check<double>(embed_x_candidate(p), u, 2);
  EXPECT_LT(bad.worst_margin, 0.0);
  EXPECT_EQ(bad.worst_sample, 1);
  EXPECT_THROW(concavity_condition_check<double>(embed_x_candidate(p), u, 3), ConfigError);
}

TEST(Sweep, SmallRun) {
  const auto s = candidate_sweep<double>(200, 2, 5.0, 3);
  EXPECT_TRUE(s.all_inside);
  EXPECT_LT(s.max_fd_relative_error, 1e-6);
  EXPECT_GE(s.min_eigenvalue, -1e-10);
  EXPECT_LT(s.max_degenerate_form, 1e-10);
  EXPECT_GE(s.worst_x_only_margin, 0.0);
}
