#pragma once

// Bellman-function side: the domain D_Q, the explicit candidate X - |x|^2 / d
// with its closed-form negative Hessian, and the concavity condition
// -d^2 B(u, u) >= 2 |u_x| |u_y|.
//
// Full-space displacements use the real coordinate layout
//   (X, Y, Re x, Im x, Re y_1, Im y_1, ..., Re y_n, Im y_n, r, s),
// of size 2n + 6.

#include <cmath>
#include <complex>
#include <numbers>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rieszlab/errors.hpp"
#include "rieszlab/random.hpp"

namespace rieszlab {

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real = double>
struct BellmanPoint {
  Real X = 0;
  Real Y = 0;
  std::complex<Real> x;
  ComplexVector<Real> y;
  Real r = 1;
  Real s = 1;
  Real Q = 2;
};

template <typename Real = double>
struct DomainMargins {
  Real x_margin = 0;   ///< X s - |x|^2
  Real y_margin = 0;   ///< Y r - |y|^2
  Real lower = 0;      ///< r s - 1
  Real upper = 0;      ///< Q - r s
  bool inside = false;
};

template <typename Real>
DomainMargins<Real> domain_membership(const BellmanPoint<Real>& p) {
  DomainMargins<Real> m;
  m.x_margin = p.X * p.s - std::norm(p.x);
  m.y_margin = p.Y * p.r - p.y.squaredNorm();
  m.lower = p.r * p.s - 1;
  m.upper = p.Q - p.r * p.s;
  m.inside = m.x_margin > 0 && m.y_margin > 0 && m.lower > 0 && m.upper > 0;
  return m;
}

/// Index helper for the full-space coordinate layout.
struct BellmanLayout {
  int n = 1;

  int size() const { return 2 * n + 6; }
  int X() const { return 0; }
  int Y() const { return 1; }
  int x_re() const { return 2; }
  int x_im() const { return 3; }
  int y_re(int k) const { return 4 + 2 * k; }
  int y_im(int k) const { return 5 + 2 * k; }
  int r() const { return 2 * n + 4; }
  int s() const { return 2 * n + 5; }
};

template <typename Real>
Real candidate_value(Real X, const ComplexVector<Real>& x, Real d) {
  if (!(d > 0)) throw ConfigError("candidate needs a positive denominator");
  return X - x.squaredNorm() / d;
}

/// Value and negative Hessian of B(X, x, d) = X - |x|^2 / d, x in C^n, over the
/// real coordinates (X, Re x_1, Im x_1, ..., Re x_n, Im x_n, d).
template <typename Real = double>
struct Candidate {
  Real value = 0;
  Real X = 0;
  ComplexVector<Real> x;
  Real d = 1;
  RealMatrix<Real> negative_hessian;

  /// (2/d) |x dd/d - dx|^2; the displacement of X carries no curvature.
  Real negative_form(Real /*dX*/, const ComplexVector<Real>& dx, Real dd) const {
    return 2 / d * (x * (dd / d) - dx).squaredNorm();
  }
};

template <typename Real>
Candidate<Real> candidate_value_and_hessian(Real X, const ComplexVector<Real>& x, Real d) {
  if (!(d > 0)) throw ConfigError("candidate needs a positive denominator");
  const Eigen::Index n = x.size();
  Candidate<Real> c;
  c.value = X - x.squaredNorm() / d;
  c.X = X;
  c.x = x;
  c.d = d;
  const Eigen::Index size = 2 * n + 2;
  c.negative_hessian = RealMatrix<Real>::Zero(size, size);
  RealVector<Real> u(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    u[2 * k] = x[k].real();
    u[2 * k + 1] = x[k].imag();
  }
  c.negative_hessian.block(1, 1, 2 * n, 2 * n) = RealMatrix<Real>::Identity(2 * n, 2 * n) * (2 / d);
  c.negative_hessian.block(1, size - 1, 2 * n, 1) = -2 * u / (d * d);
  c.negative_hessian.block(size - 1, 1, 1, 2 * n) = (-2 * u / (d * d)).transpose();
  c.negative_hessian(size - 1, size - 1) = 2 * u.squaredNorm() / (d * d * d);
  return c;
}

/// Second directional derivative of f at p along dir from central differences
/// at steps h, h/2, h/4 combined by two rounds of Richardson extrapolation.
template <typename Real, typename F>
Real richardson_second_derivative(F&& f, const RealVector<Real>& p, const RealVector<Real>& dir, Real h) {
  const Real f0 = f(p);
  auto central = [&](Real step) {
    return (f(RealVector<Real>(p + step * dir)) - 2 * f0 + f(RealVector<Real>(p - step * dir))) / (step * step);
  };
  const Real d1 = central(h), d2 = central(h / 2), d3 = central(h / 4);
  const Real r1 = (4 * d2 - d1) / 3;
  const Real r2 = (4 * d3 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

/// Embeds the negative Hessian of X - |x|^2 / s (the x-block candidate, paired
/// with s through |x|^2 < X s) into the full coordinate layout.
template <typename Real>
RealMatrix<Real> embed_x_candidate(const BellmanPoint<Real>& p) {
  const BellmanLayout L{static_cast<int>(p.y.size())};
  ComplexVector<Real> x(1);
  x[0] = p.x;
  const auto c = candidate_value_and_hessian(p.X, x, p.s);
  const int map[4] = {L.X(), L.x_re(), L.x_im(), L.s()};
  RealMatrix<Real> H = RealMatrix<Real>::Zero(L.size(), L.size());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) H(map[i], map[j]) = c.negative_hessian(i, j);
  return H;
}

/// Embeds the negative Hessian of Y - |y|^2 / r (paired through |y|^2 < Y r).
template <typename Real>
RealMatrix<Real> embed_y_candidate(const BellmanPoint<Real>& p) {
  const int n = static_cast<int>(p.y.size());
  const BellmanLayout L{n};
  const auto c = candidate_value_and_hessian(p.Y, p.y, p.r);
  std::vector<int> map = {L.Y()};
  for (int k = 0; k < n; ++k) {
    map.push_back(L.y_re(k));
    map.push_back(L.y_im(k));
  }
  map.push_back(L.r());
  RealMatrix<Real> H = RealMatrix<Real>::Zero(L.size(), L.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = 0; j < map.size(); ++j) H(map[i], map[j]) = c.negative_hessian(i, j);
  return H;
}

template <typename Real = double>
struct ConcavityReport {
  /// min over samples of u^T H u - 2 |u_x| |u_y|
  Real worst_margin = 0;
  Eigen::Index worst_sample = -1;
};

/// Checks -d^2 B >= 2 |dx| |dy| on sampled displacements (columns of `samples`)
/// for a negative Hessian H in the full layout.
template <typename Real>
ConcavityReport<Real> concavity_condition_check(const RealMatrix<Real>& negative_hessian,
                                                const RealMatrix<Real>& samples, int n) {
  const BellmanLayout L{n};
  if (negative_hessian.rows() != L.size() || negative_hessian.cols() != L.size())
    throw ConfigError("Hessian size does not match the layout for this n");
  if (samples.rows() != L.size()) throw ConfigError("displacements must cover all six variable blocks");
  ConcavityReport<Real> out;
  out.worst_margin = std::numeric_limits<Real>::infinity();
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const auto u = samples.col(j);
    const Real form = u.dot(negative_hessian * u);
    const Real ux = std::hypot(u[L.x_re()], u[L.x_im()]);
    Real uy2 = 0;
    for (int k = 0; k < n; ++k) uy2 += u[L.y_re(k)] * u[L.y_re(k)] + u[L.y_im(k)] * u[L.y_im(k)];
    const Real margin = form - 2 * ux * std::sqrt(uy2);
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_sample = j;
    }
  }
  return out;
}

/// A point of D_Q with log-uniform X, Y, r, rs in (1, Q) and the Jensen gaps
/// |x|^2 / (X s), |y|^2 / (Y r) uniform in (0, 1).
template <typename Real = double>
BellmanPoint<Real> random_domain_point(std::mt19937_64& rng, int n, Real Q) {
  if (n < 1) throw ConfigError("y needs at least one component");
  if (!(Q > 1)) throw ConfigError("the domain needs Q > 1");
  std::uniform_real_distribution<Real> unit(0, 1);
  std::uniform_real_distribution<Real> log_scale(-1, 1);
  std::normal_distribution<Real> normal;
  auto open_unit = [&] {
    Real u = 0;
    while (u <= 0 || u >= 1) u = unit(rng);
    return u;
  };
  BellmanPoint<Real> p;
  p.Q = Q;
  p.r = std::exp(log_scale(rng));
  p.s = std::exp(open_unit() * std::log(Q)) / p.r;
  p.X = std::exp(log_scale(rng));
  p.Y = std::exp(log_scale(rng));
  const Real phase = 2 * std::numbers::pi_v<Real> * unit(rng);
  p.x = std::polar(std::sqrt(open_unit() * p.X * p.s), phase);
  p.y.resize(n);
  for (auto& v : p.y) v = {normal(rng), normal(rng)};
  p.y *= std::sqrt(open_unit() * p.Y * p.r) / p.y.norm();
  return p;
}

template <typename Real = double>
struct CandidateSweep {
  int points = 0;
  /// max |finite difference - closed form| / |closed form| over both blocks
  Real max_fd_relative_error = 0;
  /// min eigenvalue of the closed-form negative Hessian
  Real min_eigenvalue = std::numeric_limits<Real>::infinity();
  /// max |-d^2 B(u)| / (|H| |u|^2) along dx = x dd / d
  Real max_degenerate_form = 0;
  /// worst concavity margin with the y-block displacement set to zero
  Real worst_x_only_margin = std::numeric_limits<Real>::infinity();
  /// every generated point passed domain_membership
  bool all_inside = true;
};

namespace detail {

template <typename Real>
void check_candidate_block(CandidateSweep<Real>& out, std::mt19937_64& rng, Real X, const ComplexVector<Real>& x, Real d) {
  std::normal_distribution<Real> normal;
  const auto c = candidate_value_and_hessian(X, x, d);
  const Eigen::Index m = x.size();
  const Eigen::Index size = 2 * m + 2;

  Eigen::SelfAdjointEigenSolver<RealMatrix<Real>> es(c.negative_hessian, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues()[0]);

  RealVector<Real> dir(size);
  for (auto& v : dir) v = normal(rng);
  dir.normalize();
  const Real closed = dir.dot(c.negative_hessian * dir);
  RealVector<Real> p(size);
  p[0] = X;
  for (Eigen::Index k = 0; k < m; ++k) {
    p[1 + 2 * k] = x[k].real();
    p[2 + 2 * k] = x[k].imag();
  }
  p[size - 1] = d;
  auto value = [&](const RealVector<Real>& q) {
    ComplexVector<Real> z(m);
    for (Eigen::Index k = 0; k < m; ++k) z[k] = {q[1 + 2 * k], q[2 + 2 * k]};
    return candidate_value(q[0], z, q[size - 1]);
  };
  const Real fd = -richardson_second_derivative<Real>(value, p, dir, d / 100);
  out.max_fd_relative_error = std::max(out.max_fd_relative_error, std::abs(fd - closed) / std::abs(closed));

  // dx = x dd / d makes the displayed square vanish.
  RealVector<Real> u = RealVector<Real>::Zero(size);
  const Real dd = normal(rng);
  u[0] = normal(rng);
  for (Eigen::Index k = 0; k < m; ++k) {
    u[1 + 2 * k] = x[k].real() * dd / d;
    u[2 + 2 * k] = x[k].imag() * dd / d;
  }
  u[size - 1] = dd;
  const Real hnorm = c.negative_hessian.norm();
  if (hnorm > 0)
    out.max_degenerate_form =
        std::max(out.max_degenerate_form, std::abs(u.dot(c.negative_hessian * u)) / (hnorm * u.squaredNorm()));
}

}  // namespace detail

/// Checks the closed-form Hessian of both candidate blocks at `points` random
/// points of D_Q (y in C^n) against Richardson finite differences, its
/// semidefiniteness and its degenerate direction, and the concavity margin of
/// the x-block candidate on displacements without a y-component.
template <typename Real = double>
CandidateSweep<Real> candidate_sweep(int points, int n, Real Q, std::uint64_t seed) {
  if (points < 1) throw ConfigError("need at least one point");
  auto rng = make_stream(seed, 0);
  std::normal_distribution<Real> normal;
  CandidateSweep<Real> out;
  out.points = points;
  const BellmanLayout L{n};
  for (int i = 0; i < points; ++i) {
    const auto p = random_domain_point<Real>(rng, n, Q);
    out.all_inside = out.all_inside && domain_membership(p).inside;
    ComplexVector<Real> x(1);
    x[0] = p.x;
    detail::check_candidate_block(out, rng, p.X, x, p.s);
    detail::check_candidate_block(out, rng, p.Y, p.y, p.r);

    RealMatrix<Real> samples(L.size(), 8);
    for (auto& v : samples.reshaped()) v = normal(rng);
    for (int k = 0; k < n; ++k) {
      samples.row(L.y_re(k)).setZero();
      samples.row(L.y_im(k)).setZero();
    }
    const auto report = concavity_condition_check<Real>(embed_x_candidate(p), samples, n);
    out.worst_x_only_margin = std::min(out.worst_x_only_margin, report.worst_margin);
  }
  return out;
}

}  // namespace rieszlab
