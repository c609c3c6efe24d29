#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace rieszlab {

template <typename Real>
struct QuadratureResult {
  Real value = 0;
  Real error = 0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK qk15).
template <typename Real, typename F>
QuadratureResult<Real> gauss_kronrod15(F& f, Real a, Real b) {
  static constexpr Real xgk[8] = {
      0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
      0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
      0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
      0.207784955007898467600689403773245L, 0.0L};
  static constexpr Real wgk[8] = {
      0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
      0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
      0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
      0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
  static constexpr Real wg[4] = {
      0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
      0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

  const Real center = (a + b) / 2;
  const Real half = (b - a) / 2;
  const Real fc = f(center);
  Real kronrod = wgk[7] * fc;
  Real gauss = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const Real dx = half * xgk[j];
    const Real sum = f(center - dx) + f(center + dx);
    kronrod += wgk[j] * sum;
    if (j % 2 == 1) gauss += wg[j / 2] * sum;
  }
  QuadratureResult<Real> r;
  r.value = kronrod * half;
  r.error = std::abs((kronrod - gauss) * half);
  r.evaluations = 15;
  return r;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b].
///
/// Repeatedly bisects the subinterval with the largest error estimate until
/// the summed estimate drops below max(abs_tol, rel_tol * |integral|). Endpoint
/// singularities of integrable power type are handled by repeated bisection;
/// known interior kinks should be passed as separate calls.
template <typename Real, typename F>
QuadratureResult<Real> integrate(F&& f, Real a, Real b, Real rel_tol = Real(1e-11),
                                 Real abs_tol = Real(1e-15), int max_intervals = 4000) {
  struct Piece {
    Real a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  QuadratureResult<Real> total;
  if (a == b) {
    total.converged = true;
    return total;
  }
  std::priority_queue<Piece> heap;
  auto first = detail::gauss_kronrod15<Real>(f, a, b);
  total.evaluations = first.evaluations;
  heap.push({a, b, first.value, first.error});
  Real value = first.value;
  Real error = first.error;
  while (static_cast<int>(heap.size()) < max_intervals) {
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
      total.converged = true;
      break;
    }
    const Piece worst = heap.top();
    const Real mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    auto left = detail::gauss_kronrod15<Real>(f, worst.a, mid);
    auto right = detail::gauss_kronrod15<Real>(f, mid, worst.b);
    total.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push({worst.a, mid, left.value, left.error});
    heap.push({mid, worst.b, right.value, right.error});
  }
  if (!total.converged && error <= std::max(abs_tol, rel_tol * std::abs(value))) {
    total.converged = true;
  }
  // Re-sum to shed the drift of the running updates.
  value = 0;
  error = 0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  total.value = value;
  total.error = error;
  return total;
}

/// Integral of f over [a, inf) via the substitution x = a + s / (1 - s).
template <typename Real, typename F>
QuadratureResult<Real> integrate_to_infinity(F&& f, Real a, Real rel_tol = Real(1e-11),
                                             Real abs_tol = Real(1e-15),
                                             int max_intervals = 4000) {
  auto mapped = [&](Real s) -> Real {
    const Real one_minus = 1 - s;
    if (one_minus <= 0) return 0;
    const Real x = a + s / one_minus;
    const Real jacobian = 1 / (one_minus * one_minus);
    const Real fx = f(x);
    return fx == 0 ? Real(0) : fx * jacobian;
  };
  return integrate<Real>(mapped, Real(0), Real(1), rel_tol, abs_tol, max_intervals);
}

}  // namespace rieszlab
