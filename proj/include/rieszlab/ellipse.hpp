#pragma once

// Ellipse lemma: for a symmetric A on R^m x R^l x R^k with
//   (Au, u) >= 2 |u_m| |u_l|  for all u,
// find tau > 0 with A - diag(tau I_m, tau^{-1} I_l, 0) positive semidefinite.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "rieszlab/errors.hpp"
#include "rieszlab/random.hpp"

namespace rieszlab {

template <typename Real = double>
struct EllipseProblem {
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> A;
  int m = 1;
  int l = 1;
  int k = 0;
};

template <typename Real = double>
struct EllipseCertificate {
  Real tau = 1;
  /// smallest eigenvalue of A - diag(tau I_m, tau^{-1} I_l, 0)
  Real residual = 0;
  int iterations = 0;

  bool valid() const { return residual >= Real(-1e-9); }
};

template <typename Real = double>
struct EllipseOptions {
  Real tau_min = Real(1e-6);
  Real tau_max = Real(1e6);
  int scan_points = 121;
  int max_refinements = 200;
  /// Hypothesis pre-check: random restarts on top of the coordinate starts.
  int hypothesis_restarts = 16;
  std::uint64_t seed = 44;
};

template <typename Real = double>
struct HypothesisCheck {
  /// min over the unit sphere of (Au, u) - 2 |u_m| |u_l|
  Real minimum = 0;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> witness;
};

class HypothesisViolated : public ConfigError {
 public:
  HypothesisViolated(const std::string& what, Eigen::VectorXd witness, double value)
      : ConfigError(what), witness(std::move(witness)), value(value) {}
  Eigen::VectorXd witness;
  double value;
};

class NoFeasibleTau : public NonConvergence {
 public:
  NoFeasibleTau(const std::string& what, double tau_min, double tau_max, double best_residual)
      : NonConvergence(what), tau_min(tau_min), tau_max(tau_max), best_residual(best_residual) {}
  double tau_min;
  double tau_max;
  double best_residual;
};

namespace detail {

template <typename Real>
void validate(const EllipseProblem<Real>& p) {
  if (p.m < 1 || p.l < 1 || p.k < 0) throw ConfigError("partition needs m >= 1, l >= 1, k >= 0");
  const Eigen::Index d = p.m + p.l + p.k;
  if (p.A.rows() != d || p.A.cols() != d) throw ConfigError("matrix size does not match m + l + k");
  if (!p.A.allFinite()) throw ConfigError("matrix has non-finite entries");
  const Real scale = std::max(Real(1), p.A.cwiseAbs().maxCoeff());
  if ((p.A - p.A.transpose()).cwiseAbs().maxCoeff() > Real(1e-12) * scale)
    throw ConfigError("matrix is not symmetric");
}

template <typename Real>
Real min_eigenvalue(const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

template <typename Real>
Real hypothesis_value(const EllipseProblem<Real>& p, const Eigen::Matrix<Real, Eigen::Dynamic, 1>& u) {
  return u.dot(p.A * u) - 2 * u.head(p.m).norm() * u.segment(p.m, p.l).norm();
}

}  // namespace detail

/// Smallest eigenvalue of A - diag(tau I_m, tau^{-1} I_l, 0).
template <typename Real>
Real ellipse_residual(const EllipseProblem<Real>& p, Real tau) {
  auto M = p.A;
  for (int i = 0; i < p.m; ++i) M(i, i) -= tau;
  for (int i = 0; i < p.l; ++i) M(p.m + i, p.m + i) -= 1 / tau;
  return detail::min_eigenvalue(M);
}

/// Minimises (Au, u) - 2 |u_m| |u_l| over the unit sphere. The bilinear term is
/// max over unit a, b of 2 (u_l . b)(a . u_m), so the problem is
/// min over (a, b) of lambda_min(A - C(b a^T)); alternate between the
/// eigenvector for fixed (a, b) and the aligned (a, b) for that eigenvector.
template <typename Real>
HypothesisCheck<Real> ellipse_hypothesis_check(const EllipseProblem<Real>& p, const EllipseOptions<Real>& options = {}) {
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  detail::validate(p);
  HypothesisCheck<Real> best;
  best.minimum = std::numeric_limits<Real>::infinity();

  auto descend = [&](Vector a, Vector b) {
    Real previous = std::numeric_limits<Real>::infinity();
    for (int it = 0; it < 200; ++it) {
      Matrix M = p.A;
      const Matrix W = b * a.transpose();
      M.block(p.m, 0, p.l, p.m) -= W;
      M.block(0, p.m, p.m, p.l) -= W.transpose();
      Eigen::SelfAdjointEigenSolver<Matrix> es(M);
      const Vector u = es.eigenvectors().col(0);
      const Real value = detail::hypothesis_value(p, u);
      if (value < best.minimum) {
        best.minimum = value;
        best.witness = u;
      }
      const Real nm = u.head(p.m).norm(), nl = u.segment(p.m, p.l).norm();
      if (nm > 0) a = u.head(p.m) / nm;
      if (nl > 0) b = u.segment(p.m, p.l) / nl;
      if (std::abs(previous - es.eigenvalues()[0]) <= Real(1e-15) * (1 + std::abs(previous))) break;
      previous = es.eigenvalues()[0];
    }
  };

  for (int i = 0; i < p.m; ++i)
    for (int j = 0; j < p.l; ++j)
      for (int sign : {1, -1}) {
        descend(Vector::Unit(p.m, i), Vector::Unit(p.l, j) * Real(sign));
      }
  auto rng = make_stream(options.seed, 0);
  std::normal_distribution<Real> normal;
  for (int r = 0; r < options.hypothesis_restarts; ++r) {
    Vector a(p.m), b(p.l);
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng);
    descend(a.normalized(), b.normalized());
  }
  return best;
}

/// Scans log tau on [tau_min, tau_max], then refines the best bracket by
/// golden-section search in log tau (the residual is concave in tau).
template <typename Real>
EllipseCertificate<Real> ellipse_solve(const EllipseProblem<Real>& p, const EllipseOptions<Real>& options = {}) {
  detail::validate(p);
  if (!(options.tau_min > 0) || !(options.tau_max > options.tau_min) || options.scan_points < 3)
    throw ConfigError("tau scan needs 0 < tau_min < tau_max and at least 3 points");

  const auto hypothesis = ellipse_hypothesis_check(p, options);
  if (hypothesis.minimum < Real(-1e-9)) {
    throw HypothesisViolated("hypothesis (Au,u) >= 2|u_m||u_l| fails", hypothesis.witness.template cast<double>(),
                             static_cast<double>(hypothesis.minimum));
  }

  const Real lo = std::log(options.tau_min), hi = std::log(options.tau_max);
  const Real step = (hi - lo) / (options.scan_points - 1);
  int best_index = 0;
  Real best_value = -std::numeric_limits<Real>::infinity();
  for (int i = 0; i < options.scan_points; ++i) {
    const Real value = ellipse_residual(p, std::exp(lo + step * i));
    if (value > best_value) {
      best_value = value;
      best_index = i;
    }
  }
  EllipseCertificate<Real> cert;
  cert.iterations = options.scan_points;
  cert.tau = std::exp(lo + step * best_index);
  cert.residual = best_value;

  Real a = lo + step * std::max(0, best_index - 1);
  Real b = lo + step * std::min(options.scan_points - 1, best_index + 1);
  const Real ratio = (std::sqrt(Real(5)) - 1) / 2;
  Real c = b - ratio * (b - a), d = a + ratio * (b - a);
  Real fc = ellipse_residual(p, std::exp(c)), fd = ellipse_residual(p, std::exp(d));
  cert.iterations += 2;
  for (int it = 0; it < options.max_refinements && b - a > Real(1e-15) * (1 + std::abs(a)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = ellipse_residual(p, std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = ellipse_residual(p, std::exp(d));
    }
    ++cert.iterations;
  }
  const Real mid = (a + b) / 2;
  const Real fm = ellipse_residual(p, std::exp(mid));
  if (fm > cert.residual) {
    cert.tau = std::exp(mid);
    cert.residual = fm;
  }
  if (!cert.valid()) {
    throw NoFeasibleTau("no tau in the scanned range gives a semidefinite residual",
                        static_cast<double>(options.tau_min), static_cast<double>(options.tau_max),
                        static_cast<double>(cert.residual));
  }
  return cert;
}

}  // namespace rieszlab
