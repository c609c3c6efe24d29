#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

namespace rieszlab {

template <typename Real = double>
struct NormEstimate {
  Real value = 0;
  int iterations = 0;
  /// Relative change of the last Rayleigh quotient (power iteration), 0 for dense.
  Real residual = 0;
  std::string method;
  bool converged = false;
};

/// Largest singular value of an operator T from its Gram map x -> T*T x.
///
/// Power iteration on the Gram operator; converged when successive Rayleigh
/// quotients differ by less than tol relative to the current one. On budget
/// exhaustion the last estimate is returned with converged = false.
template <typename Real, typename Vector, typename Gram>
NormEstimate<Real> power_iteration(Gram&& gram, Vector x, Real tol, int max_iterations) {
  NormEstimate<Real> out;
  out.method = "power-iteration";
  Real start_norm = x.matrix().norm();
  if (start_norm == 0) return out;
  x /= start_norm;
  Real previous = -1;
  for (int it = 1; it <= max_iterations; ++it) {
    Vector y = gram(x);
    const Real rayleigh = std::real(x.matrix().dot(y.matrix()));
    const Real ynorm = y.matrix().norm();
    out.iterations = it;
    out.value = std::sqrt(std::max(rayleigh, Real(0)));
    if (ynorm == 0) {
      out.converged = true;
      out.residual = 0;
      return out;
    }
    if (previous >= 0) {
      out.residual = std::abs(rayleigh - previous) / std::max(std::abs(rayleigh), std::numeric_limits<Real>::min());
      if (out.residual < tol) {
        out.converged = true;
        return out;
      }
    }
    previous = rayleigh;
    x = y / ynorm;
  }
  return out;
}

}  // namespace rieszlab
