#pragma once

// Poisson extension in two flavours:
//  - spectral, on the torus: P_t = exp(-t A) with A = sqrt(-Laplacian); exact
//    semigroup, used for transform experiments;
//  - kernel, either as a positive normalized convolution on the torus (used for
//    sampled weights) or as radial quadrature on R^n (used for power weights and
//    the shell divergence analysis).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rieszlab/errors.hpp"
#include "rieszlab/fields.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

/// Surface measure of the unit sphere S^{n-1} in R^n.
template <typename Real = double>
Real sphere_measure(int n) {
  return 2 * std::pow(std::numbers::pi_v<Real>, Real(n) / 2) / std::tgamma(Real(n) / 2);
}

/// Volume of the unit ball in R^n.
template <typename Real = double>
Real ball_volume(int n) {
  return std::pow(std::numbers::pi_v<Real>, Real(n) / 2) / std::tgamma(Real(n) / 2 + 1);
}

/// Integral over [0, b] of u^beta g(u) for beta > -1, via v = u^{beta+1}, which
/// removes the endpoint singularity when g is smooth at 0.
template <typename Real, typename G>
QuadratureResult<Real> integrate_power_singular(G&& g, Real beta, Real b,
                                                Real rel_tol = Real(1e-11)) {
  const Real e = beta + 1;
  auto mapped = [&](Real v) -> Real { return g(std::pow(v, 1 / e)) / e; };
  return integrate<Real>(mapped, Real(0), std::pow(b, e), rel_tol);
}

/// P_t(y) = c_n t / (t^2 + |y|^2)^{(n+1)/2}.
///
/// The normalizer c_n is fixed by requiring unit mass, computed by quadrature;
/// closed_form_normalizer() is Gamma((n+1)/2) / pi^{(n+1)/2} and serves as a
/// cross-check only.
template <typename Real = double>
class PoissonKernel {
 public:
  explicit PoissonKernel(int dim) : dim_(dim) {
    if (dim < 1) throw ConfigError("kernel dimension must be positive");
    const Real exponent = Real(dim + 1) / 2;
    auto radial = [&](Real r) { return std::pow(r, Real(dim - 1)) / std::pow(1 + r * r, exponent); };
    const Real head = integrate<Real>(radial, Real(0), Real(1), Real(1e-13)).value;
    const Real tail = integrate_to_infinity<Real>(radial, Real(1), Real(1e-13)).value;
    normalizer_ = 1 / (sphere_measure<Real>(dim) * (head + tail));
  }

  int dim() const { return dim_; }
  Real normalizer() const { return normalizer_; }

  static Real closed_form_normalizer(int dim) {
    return std::tgamma(Real(dim + 1) / 2) /
           std::pow(std::numbers::pi_v<Real>, Real(dim + 1) / 2);
  }

  Real operator()(Real t, Real distance) const {
    return normalizer_ * t / std::pow(t * t + distance * distance, Real(dim_ + 1) / 2);
  }

 private:
  int dim_;
  Real normalizer_ = 0;
};

// ---------------------------------------------------------------------------
// Spectral route (torus)

template <typename Real>
Multiplier<Real> poisson_multiplier(const Grid<Real>& grid, Real t) {
  ComplexArray<Real> s(grid.point_count());
  for (std::size_t i = 0; i < grid.point_count(); ++i) s[i] = std::exp(-t * grid.frequency_norm(i));
  return Multiplier<Real>(grid, std::move(s));
}

/// Symbol d/dt exp(-t|xi|) = -|xi| exp(-t|xi|).
template <typename Real>
Multiplier<Real> poisson_derivative_multiplier(const Grid<Real>& grid, Real t) {
  ComplexArray<Real> s(grid.point_count());
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    const Real xi = grid.frequency_norm(i);
    s[i] = -xi * std::exp(-t * xi);
  }
  return Multiplier<Real>(grid, std::move(s));
}

/// Gradient symbols i xi_k, one per axis.
template <typename Real>
std::vector<Multiplier<Real>> gradient_multipliers(const Grid<Real>& grid) {
  std::vector<Multiplier<Real>> out;
  for (int k = 0; k < grid.dim(); ++k) {
    out.push_back(Multiplier<Real>::from_symbol(grid, [k](std::span<const Real> xi) {
      return std::complex<Real>(0, xi[k]);
    }));
  }
  return out;
}

template <typename Real>
ScalarField<Real> poisson_extend(const ScalarField<Real>& f, Real t) {
  if (t < 0) throw ConfigError("Poisson extension needs t >= 0");
  if (t == 0) return f;
  return apply_multiplier(poisson_multiplier(f.grid(), t), f);
}

template <typename Real>
VectorField<Real> poisson_extend(const VectorField<Real>& f, Real t) {
  if (t < 0) throw ConfigError("Poisson extension needs t >= 0");
  if (t == 0) return f;
  return apply_multiplier(poisson_multiplier(f.grid(), t), f);
}

template <typename Real>
ScalarField<Real> poisson_derivative_t(const ScalarField<Real>& f, Real t) {
  if (!(t > 0)) throw ConfigError("t-derivative of the Poisson extension needs t > 0");
  return apply_multiplier(poisson_derivative_multiplier(f.grid(), t), f);
}

template <typename Real>
VectorField<Real> poisson_derivative_t(const VectorField<Real>& f, Real t) {
  if (!(t > 0)) throw ConfigError("t-derivative of the Poisson extension needs t > 0");
  return apply_multiplier(poisson_derivative_multiplier(f.grid(), t), f);
}

template <typename Real>
VectorField<Real> gradient(const ScalarField<Real>& f) {
  const auto m = gradient_multipliers(f.grid());
  return apply_multiplier(std::span<const Multiplier<Real>>(m), f);
}

// ---------------------------------------------------------------------------
// Kernel route (torus): positive normalized convolution

namespace detail {

// Periodized kernel mass at displacement d (already wrapped into [-L/2, L/2)).
template <typename Real>
Real periodized_kernel(const PoissonKernel<Real>& kernel, const Grid<Real>& grid,
                       std::span<const Real> d, Real t, int image_shells) {
  const int n = grid.dim();
  const int side = 2 * image_shells + 1;
  int images = 1;
  for (int a = 0; a < n; ++a) images *= side;
  Real total = 0;
  for (int code = 0; code < images; ++code) {
    int c = code;
    Real r2 = 0;
    for (int a = 0; a < n; ++a) {
      const int m = c % side - image_shells;
      c /= side;
      const Real x = d[a] + m * grid.extent();
      r2 += x * x;
    }
    total += kernel(t, std::sqrt(r2));
  }
  return total;
}

// Mass of the R^n kernel outside the cube [-a, a]^n: closed forms for n = 1
// (arctangent) and n = 2 (solid angle of a square), an equal-volume ball above.
template <typename Real>
Real kernel_tail_mass(const PoissonKernel<Real>& kernel, Real t, Real a) {
  const int n = kernel.dim();
  const Real pi = std::numbers::pi_v<Real>;
  if (n == 1) return 1 - 2 * std::atan(a / t) / pi;
  if (n == 2) return 1 - 2 * std::asin(a * a / (a * a + t * t)) / pi;
  const Real radius = 2 * a / std::pow(ball_volume<Real>(n), Real(1) / n);
  const Real exponent = Real(n + 1) / 2;
  auto radial = [&](Real r) { return std::pow(r, Real(n - 1)) / std::pow(t * t + r * r, exponent); };
  return kernel.normalizer() * sphere_measure<Real>(n) * t *
         integrate_to_infinity<Real>(radial, radius, Real(1e-12)).value;
}

template <typename Real>
Real wrap(Real x, Real period) {
  x = std::fmod(x + period / 2, period);
  if (x < 0) x += period;
  return x - period / 2;
}

}  // namespace detail

/// Periodized kernel sampled at the grid displacements, indexed so that flat
/// position i holds the weight for displacement (freq(i_a) h)_a. The images
/// within `image_shells` periods are summed and normalized to carry the mass of
/// the cube they cover; the mass beyond is spread uniformly, i.e. the far
/// images see the mean of the field.
template <typename Real>
RealArray<Real> torus_kernel_samples(const Grid<Real>& grid, Real t, int image_shells = 1) {
  if (!(t > 0)) throw ConfigError("kernel route needs t > 0");
  if (image_shells < 0) throw ConfigError("image shell count must be nonnegative");
  const PoissonKernel<Real> kernel(grid.dim());
  RealArray<Real> k(grid.point_count());
  std::vector<Real> d(grid.dim());
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    for (int a = 0; a < grid.dim(); ++a) d[a] = grid.frequency(grid.index(i, a)) * grid.spacing();
    k[i] = detail::periodized_kernel(kernel, grid, std::span<const Real>(d), t, image_shells);
  }
  const Real tail = detail::kernel_tail_mass(kernel, t, (image_shells + Real(0.5)) * grid.extent());
  return k * ((1 - tail) / k.sum()) + tail / static_cast<Real>(grid.point_count());
}

/// Kernel-route extension on the torus: a positive averaging operator, so it
/// obeys the maximum principle and Jensen's inequality exactly.
template <typename Real>
ScalarField<Real> poisson_extend_kernel(const ScalarField<Real>& f, Real t, int image_shells = 1) {
  if (t < 0) throw ConfigError("Poisson extension needs t >= 0");
  if (t == 0) return f;
  const Grid<Real>& g = f.grid();
  ScalarField<Real> kernel(g, torus_kernel_samples(g, t, image_shells).template cast<std::complex<Real>>());
  Spectrum<Real> kf = forward_transform(kernel);
  Spectrum<Real> ff = forward_transform(f);
  ff.coefficients() *= kf.coefficients() * static_cast<Real>(g.point_count());
  return inverse_transform(ff);
}

/// Kernel-route extension of sampled data evaluated at an arbitrary point x;
/// agrees with poisson_extend_kernel at grid nodes.
template <typename Real>
Real poisson_kernel_value_at(const Grid<Real>& grid, const RealArray<Real>& values,
                             std::span<const Real> x, Real t, int image_shells = 1) {
  if (!(t > 0)) throw ConfigError("kernel route needs t > 0");
  const PoissonKernel<Real> kernel(grid.dim());
  std::vector<Real> d(grid.dim());
  Real mass = 0;
  Real acc = 0;
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    for (int a = 0; a < grid.dim(); ++a)
      d[a] = detail::wrap(x[a] - grid.coordinate(grid.index(i, a)), grid.extent());
    const Real k = detail::periodized_kernel(kernel, grid, std::span<const Real>(d), t, image_shells);
    mass += k;
    acc += k * values[i];
  }
  const Real tail = detail::kernel_tail_mass(kernel, t, (image_shells + Real(0.5)) * grid.extent());
  return (1 - tail) * acc / mass + tail * values.mean();
}

// ---------------------------------------------------------------------------
// Radial route (R^n) for power weights |x|^alpha

/// Integral of P_1(s e_1 - rho theta) over theta in the unit sphere S^{n-1},
/// times rho-independent factors; the angular part of the Poisson integral of a
/// radial function evaluated at distance s from the origin with t = 1.
template <typename Real>
Real sphere_kernel_integral(const PoissonKernel<Real>& kernel, Real s, Real rho) {
  const int n = kernel.dim();
  const Real c = kernel.normalizer();
  const Real a = 1 + s * s + rho * rho;
  const Real b = 2 * s * rho;
  switch (n) {
    case 1:
      return c * (1 / (1 + (s - rho) * (s - rho)) + 1 / (1 + (s + rho) * (s + rho)));
    case 2: {
      // int_0^pi (a - b cos phi)^{-3/2} dphi = 2 E(k) / ((a - b) sqrt(a + b)), k^2 = 2b/(a+b).
      const Real k = std::sqrt(2 * b / (a + b));
      return c * 2 * 2 * std::comp_ellint_2(k) / ((a - b) * std::sqrt(a + b));
    }
    case 3:
      // 2 pi * int_{-1}^{1} (a - b u)^{-2} du
      return c * 2 * std::numbers::pi_v<Real> * 2 / ((a - b) * (a + b));
    default: {
      const Real exponent = Real(n + 1) / 2;
      auto angular = [&](Real phi) {
        return std::pow(std::sin(phi), Real(n - 2)) / std::pow(a - b * std::cos(phi), exponent);
      };
      const Real inner = integrate<Real>(angular, Real(0), std::numbers::pi_v<Real>, Real(1e-12)).value;
      return c * sphere_measure<Real>(n - 1) * inner;
    }
  }
}

/// Whether P_t |x|^alpha is finite in dimension n: local integrability needs
/// alpha > -n and the kernel tail needs alpha < 1.
inline bool power_weight_extension_converges(double alpha, int dim) {
  return alpha > -dim && alpha < 1;
}

/// P_t(|.|^alpha)(x) for |x| = distance, by radial quadrature. Uses the scaling
/// P_t w_alpha(x) = t^alpha P_1 w_alpha(x / t).
template <typename Real>
Real power_weight_extension(Real alpha, int dim, Real distance, Real t,
                            Real rel_tol = Real(1e-10)) {
  if (!(t > 0)) throw ConfigError("Poisson extension of a power weight needs t > 0");
  if (!power_weight_extension_converges(static_cast<double>(alpha), dim))
    throw DivergenceError("Poisson integral of |x|^" + std::to_string(static_cast<double>(alpha)) +
                          " diverges in dimension " + std::to_string(dim));
  const PoissonKernel<Real> kernel(dim);
  const Real s = std::abs(distance) / t;
  const Real beta = alpha + dim - 1;
  auto angular = [&](Real rho) { return sphere_kernel_integral(kernel, s, rho); };
  auto full = [&](Real rho) { return std::pow(rho, beta) * angular(rho); };

  const Real head_end = std::max(Real(1), s) / 2;
  Real total = integrate_power_singular<Real>(angular, beta, head_end, rel_tol).value;
  std::vector<Real> breaks = {head_end};
  if (s > head_end) breaks.push_back(s);
  breaks.push_back(2 * (s + 1));
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    total += integrate<Real>(full, breaks[i], breaks[i + 1], rel_tol).value;
  // Tail: rho = R / v turns the rho^{alpha-2} decay into v^{-alpha} at v = 0.
  const Real R = breaks.back();
  auto tail = [&](Real v) -> Real {
    if (v <= 0) {
      // limit of v^alpha * full(R/v) * R / v^2 as v -> 0
      return std::pow(R, alpha - 1) * kernel.normalizer() * sphere_measure<Real>(dim);
    }
    const Real rho = R / v;
    return std::pow(v, alpha) * full(rho) * R / (v * v);
  };
  total += integrate_power_singular<Real>(tail, -alpha, Real(1), rel_tol).value;
  return std::pow(t, alpha) * total;
}

// ---------------------------------------------------------------------------
// Dyadic shell analysis of P_t |x|^alpha (0) on R^n

template <typename Real = double>
struct RadialShellTable {
  Real alpha = 0;
  int dim = 0;
  Real t = 0;
  /// shell_sums[0] covers [0, t); shell_sums[k] covers [2^{k-1} t, 2^k t).
  std::vector<Real> shell_sums;
  bool diverged = false;
  /// Geometric mean of successive shell ratios over the last quarter of shells.
  Real growth_ratio_estimate = 0;
  /// Sum of all shells plus the geometric tail when converged; +inf when diverged.
  Real total = 0;

  Real ratio(std::size_t k) const {
    return k == 0 || shell_sums[k - 1] == 0 ? std::numeric_limits<Real>::quiet_NaN()
                                            : shell_sums[k] / shell_sums[k - 1];
  }
};

/// Splits the radial Poisson integral of |x|^alpha at the origin into dyadic
/// shells and decides convergence from the trend of successive shell ratios.
/// The shell integrand is c_n |S^{n-1}| t r^{alpha+n-1} / (t^2 + r^2)^{(n+1)/2}.
template <typename Real>
RadialShellTable<Real> radial_divergence_analysis(Real alpha, int dim, Real t, int max_shells) {
  if (dim < 1) throw ConfigError("dimension must be positive");
  if (!(alpha > -dim)) throw ConfigError("|x|^alpha is not locally integrable for alpha <= -n");
  if (!(t > 0)) throw ConfigError("shell analysis needs t > 0");
  if (max_shells < 8) throw ConfigError("shell analysis needs at least 8 shells");

  const PoissonKernel<Real> kernel(dim);
  const Real prefactor = kernel.normalizer() * sphere_measure<Real>(dim) * t;
  const Real exponent = Real(dim + 1) / 2;
  const Real beta = alpha + dim - 1;
  auto smooth = [&](Real r) { return prefactor / std::pow(t * t + r * r, exponent); };
  auto full = [&](Real r) { return std::pow(r, beta) * smooth(r); };

  RadialShellTable<Real> table;
  table.alpha = alpha;
  table.dim = dim;
  table.t = t;
  table.shell_sums.push_back(integrate_power_singular<Real>(smooth, beta, t, Real(1e-13)).value);
  for (int k = 1; k <= max_shells; ++k) {
    const Real lo = std::ldexp(t, k - 1);
    const Real hi = std::ldexp(t, k);
    table.shell_sums.push_back(integrate<Real>(full, lo, hi, Real(1e-13)).value);
  }

  const int last = max_shells;
  const int first = std::max(2, last - std::max(1, max_shells / 4) + 1);
  Real log_sum = 0;
  for (int k = first; k <= last; ++k) log_sum += std::log(table.ratio(k));
  table.growth_ratio_estimate = std::exp(log_sum / (last - first + 1));
  table.diverged = table.growth_ratio_estimate >= 1;

  Real sum = 0;
  for (Real v : table.shell_sums) sum += v;
  if (table.diverged) {
    table.total = std::numeric_limits<Real>::infinity();
  } else {
    const Real q = table.growth_ratio_estimate;
    table.total = sum + table.shell_sums.back() * q / (1 - q);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Semigroup representation of the Riesz pairing

template <typename Real = double>
struct LogTimeGrid {
  Real t_min = Real(1e-3);
  Real t_max = Real(1e2);
  int count = 200;

  std::vector<Real> nodes() const {
    std::vector<Real> t(count);
    const Real a = std::log(t_min), b = std::log(t_max);
    for (int j = 0; j < count; ++j)
      t[j] = count == 1 ? t_min : std::exp(a + (b - a) * j / (count - 1));
    return t;
  }

  /// Trapezoid weights in log t including the dt = t dlog t Jacobian.
  std::vector<Real> weights() const {
    const auto t = nodes();
    std::vector<Real> w(count, 0);
    if (count < 2) return w;
    const Real step = (std::log(t_max) - std::log(t_min)) / (count - 1);
    for (int j = 0; j < count; ++j) w[j] = step * t[j] * ((j == 0 || j == count - 1) ? Real(0.5) : Real(1));
    return w;
  }
};

template <typename Real = double>
struct SemigroupCheck {
  std::complex<Real> lhs;
  std::complex<Real> rhs;
  Real relative_error = 0;
  /// Estimated mass of the t-integral outside [t_min, t_max].
  Real truncation_estimate = 0;
};

/// Compares (g, R f) with 4 int_0^inf (A P_t g, grad P_t f) t dt, where
/// A P_t = -d/dt P_t. The t-integral is truncated to the log grid and
/// evaluated with the trapezoid rule in log t.
template <typename Real, typename RieszApply>
SemigroupCheck<Real> semigroup_identity_check(const ScalarField<Real>& f, const VectorField<Real>& g,
                                              const LogTimeGrid<Real>& quadrature,
                                              RieszApply&& riesz_apply) {
  if (quadrature.count < 2 || !(quadrature.t_min > 0) || !(quadrature.t_max > quadrature.t_min))
    throw ConfigError("semigroup check needs at least two log-spaced nodes in (0, inf)");
  if (g.size() != f.grid().dim()) throw ConfigError("g must have one component per dimension");
  f.require_same_grid(g[0]);
  const Spectrum<Real> fhat = forward_transform(f);
  const Real mean = std::abs(fhat.coefficients()[0]);
  const Real scale = std::sqrt(fhat.coefficients().abs2().sum());
  if (mean > Real(1e-12) * std::max(scale, Real(1)))
    throw ConfigError("semigroup check requires a mean-zero f (|mean coefficient| = " +
                      std::to_string(static_cast<double>(mean)) + ")");

  SemigroupCheck<Real> out;
  out.lhs = inner_product(g, riesz_apply(f));

  const auto t = quadrature.nodes();
  const auto w = quadrature.weights();
  std::vector<Real> integrand_abs(t.size());
  std::complex<Real> acc = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const VectorField<Real> ag = Real(-1) * poisson_derivative_t(g, t[j]);
    const VectorField<Real> grad_pf = gradient(poisson_extend(f, t[j]));
    const std::complex<Real> pairing = inner_product(ag, grad_pf);
    acc += w[j] * t[j] * pairing;
    integrand_abs[j] = 4 * t[j] * std::abs(pairing);
  }
  out.rhs = Real(4) * acc;
  out.relative_error = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.lhs), std::numeric_limits<Real>::min());

  // Near 0 the integrand is ~ linear in t; at the top it decays like exp(-2 t xi_min).
  const Real xi_min = 2 * std::numbers::pi_v<Real> / f.grid().extent();
  out.truncation_estimate =
      integrand_abs.front() * quadrature.t_min / 2 + integrand_abs.back() / (2 * xi_min);
  return out;
}

}  // namespace rieszlab
