#include "rieszlab/characteristic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "rieszlab/errors.hpp"
#include "rieszlab/parallel.hpp"
#include "rieszlab/poisson.hpp"

namespace rieszlab {

namespace {

std::vector<double> axis_points(double extent, int count) {
  if (count == 1) return {0.0};
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = -extent + 2 * extent * i / (count - 1);
  return out;
}

std::vector<double> log_points(double lo, double hi, int count) {
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  return out;
}

std::vector<double> lattice_point(const std::vector<double>& axis, int dim, long code) {
  std::vector<double> c(dim);
  const long m = static_cast<long>(axis.size());
  for (int a = dim - 1; a >= 0; --a) {
    c[a] = axis[code % m];
    code /= m;
  }
  return c;
}

long int_pow(long base, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Comparisons treat values within a relative 1e-12 as tied and keep the
// earlier candidate, so rounding noise cannot steer the search.
constexpr double kTie = 1e-12;

bool clearly_greater(double a, double b) { return a > b + kTie * std::abs(b); }

long first_near_max(const std::vector<double>& values) {
  const double top = *std::max_element(values.begin(), values.end());
  long i = 0;
  while (clearly_greater(top, values[i])) ++i;
  return i;
}

struct Incumbent {
  std::vector<double> center;
  double log_scale = 0;
  double value = -1;
};

// Maximizes f on [a, b] by golden-section search; returns (argmax, max).
template <typename F>
std::pair<double, double> golden_maximize(F&& f, double a, double b, int iterations) {
  const double ratio = (std::sqrt(5.0) - 1) / 2;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (!clearly_greater(fd, fc)) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return !clearly_greater(fd, fc) ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

constexpr int kGoldenIterations = 30;

// Coordinate-wise golden-section refinement of (centre, log scale) around the
// incumbent; each coordinate is searched within +-step of its current value.
template <typename F>
int refine(Incumbent& best, F&& objective, double center_step, double log_step, double log_lo, double log_hi,
           int sweeps) {
  int steps = 0;
  const int n = static_cast<int>(best.center.size());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int coord = 0; coord <= n; ++coord) {
      auto probe = [&](double v) {
        std::vector<double> c = best.center;
        double ls = best.log_scale;
        if (coord < n) c[coord] = v;
        else ls = v;
        const double value = objective(c, ls);
        if (!std::isfinite(value)) throw NonConvergence("characteristic refinement produced a non-finite value");
        return value;
      };
      const double centre = coord < n ? best.center[coord] : best.log_scale;
      const double step = coord < n ? center_step : log_step;
      double lo = centre - step, hi = centre + step;
      if (coord == n) {
        lo = std::max(lo, log_lo);
        hi = std::min(hi, log_hi);
        if (!(hi > lo)) continue;
      }
      const auto [arg, value] = golden_maximize(probe, lo, hi, kGoldenIterations);
      steps += kGoldenIterations + 2;
      if (clearly_greater(value, best.value)) {
        if (coord < n) best.center[coord] = arg;
        else best.log_scale = arg;
        best.value = value;
      }
    }
  }
  return steps;
}

void validate_p(double p) {
  if (!(p > 1) || !std::isfinite(p)) throw ConfigError("characteristic needs p > 1");
}

void validate_dim(const Weight& w, int dim) {
  if (dim < 1) throw ConfigError("dimension must be positive");
  if (weight_dim(w, dim) != dim) throw ConfigError("weight dimension does not match the requested dimension");
}

double combine(double a, double b, double p) { return a * std::pow(b, p - 1); }

// Divergence of P_t |x|^beta, decided by the shell analysis when the exponent is
// locally integrable.
void require_poisson_convergence(double beta, int dim, const std::string& label) {
  if (!(beta > -dim))
    throw DivergenceError("Poisson integral of " + label + " = |x|^" + std::to_string(beta) +
                          " diverges: not locally integrable at 0");
  const auto table = radial_divergence_analysis<double>(beta, dim, 1.0, 32);
  if (table.diverged || !power_weight_extension_converges(beta, dim)) {
    throw DivergenceError("Poisson integral of " + label + " = |x|^" + std::to_string(beta) +
                          " diverges: shell growth ratio " + std::to_string(table.growth_ratio_estimate));
  }
}

}  // namespace

std::string to_string(CharacteristicKind kind) {
  return kind == CharacteristicKind::Classical ? "classical" : "poisson";
}

CharacteristicReport classical_characteristic(const Weight& w, double p, const BallSearch& search, int dim) {
  validate_p(p);
  validate_dim(w, dim);
  if (search.centers_per_axis < 1 || search.radius_count < 1) throw ConfigError("ball family is empty");
  if (!(search.radius_min > 0) || search.radius_max < search.radius_min || !(search.center_extent >= 0))
    throw ConfigError("ball family needs 0 < radius_min <= radius_max and center_extent >= 0");
  if (search.refinement_sweeps < 0) throw ConfigError("refinement sweeps must be nonnegative");

  const Weight dual = power(w, -1 / (p - 1));
  double radius_cap = std::numeric_limits<double>::infinity();
  if (const auto* s = std::get_if<SampledWeight>(&w)) radius_cap = s->grid.extent() / 2;
  const double rmax = std::min(search.radius_max, radius_cap);
  const double rmin = std::min(search.radius_min, rmax);

  CharacteristicReport report;
  report.kind = CharacteristicKind::Classical;
  report.p = p;
  report.weight = describe(w);

  std::atomic<bool> unresolved = false;
  auto objective = [&](const std::vector<double>& c, double log_r) {
    const Ball ball{c, std::exp(log_r)};
    const BallAverage a = ball_average(w, ball);
    const BallAverage b = ball_average(dual, ball);
    if (!a.converged || !b.converged) unresolved = true;
    return combine(a.value, b.value, p);
  };

  const auto centers = axis_points(search.center_extent, search.centers_per_axis);
  const auto radii = log_points(rmin, rmax, search.radius_count);
  const long center_count = int_pow(static_cast<long>(centers.size()), dim);
  const long total = center_count * static_cast<long>(radii.size());
  std::vector<double> values(total);
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
    const long ci = static_cast<long>(i) / static_cast<long>(radii.size());
    const long ri = static_cast<long>(i) % static_cast<long>(radii.size());
    values[i] = objective(lattice_point(centers, dim, ci), std::log(radii[ri]));
  });
  const long best_index = first_near_max(values);
  Incumbent best;
  best.center = lattice_point(centers, dim, best_index / static_cast<long>(radii.size()));
  best.log_scale = std::log(radii[best_index % static_cast<long>(radii.size())]);
  best.value = values[best_index];
  if (!std::isfinite(best.value)) throw NonConvergence("ball average produced a non-finite value");

  const double center_step = centers.size() > 1 ? centers[1] - centers[0] : rmin;
  const double log_step = radii.size() > 1 ? std::log(radii[1] / radii[0]) : std::log(2.0);
  report.refinement_steps = refine(best, objective, center_step, log_step, -std::numeric_limits<double>::infinity(),
                                   std::log(rmax), search.refinement_sweeps);
  report.samples_searched = total;
  report.value = best.value;
  report.center = best.center;
  report.scale = std::exp(best.log_scale);
  if (unresolved) report.warnings.push_back("some ball averages did not reach the 1e-3 accuracy target");
  return report;
}

CharacteristicReport poisson_characteristic(const Weight& w, double p, const PoissonSearch& search, int dim) {
  validate_p(p);
  validate_dim(w, dim);
  if (search.centers_per_axis < 1 || search.t_count < 1) throw ConfigError("half-space lattice is empty");
  if (!(search.t_min > 0) || search.t_max < search.t_min || !(search.center_extent >= 0))
    throw ConfigError("half-space lattice needs 0 < t_min <= t_max and center_extent >= 0");
  if (search.refinement_sweeps < 0) throw ConfigError("refinement sweeps must be nonnegative");

  if (const auto* pw = std::get_if<PowerWeight>(&w)) {
    require_poisson_convergence(pw->alpha, dim, "w");
    require_poisson_convergence(-pw->alpha / (p - 1), dim, "w^{-1/(p-1)}");
  }

  const Weight dual = power(w, -1 / (p - 1));
  CharacteristicReport report;
  report.kind = CharacteristicKind::Poisson;
  report.p = p;
  report.weight = describe(w);

  auto objective = [&](const std::vector<double>& x, double log_t) {
    const double t = std::exp(log_t);
    return combine(poisson_value(w, x, t), poisson_value(dual, x, t), p);
  };

  const auto times = log_points(search.t_min, search.t_max, search.t_count);
  Incumbent best;
  double center_step;

  if (const auto* s = std::get_if<SampledWeight>(&w)) {
    // Every grid node at once through the kernel-route convolution.
    const auto& sd = std::get<SampledWeight>(dual);
    const Grid<double>& g = s->grid;
    const ScalarField<double> fw(g, s->values.cast<std::complex<double>>());
    const ScalarField<double> fd(g, sd.values.cast<std::complex<double>>());
    const std::size_t nodes = g.point_count();
    std::vector<double> values(nodes * times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto pw = poisson_extend_kernel(fw, times[k]).samples().real().eval();
      const auto pd = poisson_extend_kernel(fd, times[k]).samples().real().eval();
      for (std::size_t i = 0; i < nodes; ++i) values[k * nodes + i] = combine(pw[i], pd[i], p);
    }
    const long best_index = first_near_max(values);
    best.value = values[best_index];
    best.center = g.position(static_cast<std::size_t>(best_index) % nodes);
    best.log_scale = std::log(times[static_cast<std::size_t>(best_index) / nodes]);
    report.samples_searched = static_cast<long>(g.point_count() * times.size());
    center_step = g.spacing();
  } else {
    const auto centers = axis_points(search.center_extent, search.centers_per_axis);
    const long center_count = int_pow(static_cast<long>(centers.size()), dim);
    const long total = center_count * static_cast<long>(times.size());
    std::vector<double> values(total);
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
      const long ci = static_cast<long>(i) / static_cast<long>(times.size());
      const long ti = static_cast<long>(i) % static_cast<long>(times.size());
      values[i] = objective(lattice_point(centers, dim, ci), std::log(times[ti]));
    });
    const long best_index = first_near_max(values);
    best.center = lattice_point(centers, dim, best_index / static_cast<long>(times.size()));
    best.log_scale = std::log(times[best_index % static_cast<long>(times.size())]);
    best.value = values[best_index];
    report.samples_searched = total;
    center_step = centers.size() > 1 ? centers[1] - centers[0] : search.t_min;
  }
  if (!std::isfinite(best.value)) throw NonConvergence("Poisson extension produced a non-finite value");

  const double log_step = times.size() > 1 ? std::log(times[1] / times[0]) : std::log(2.0);
  report.refinement_steps = refine(best, objective, center_step, log_step, -std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity(), search.refinement_sweeps);
  report.value = best.value;
  report.center = best.center;
  report.scale = std::exp(best.log_scale);
  return report;
}

double inclusion_constant(int dim) {
  if (dim < 1) throw ConfigError("dimension must be positive");
  const PoissonKernel<double> kernel(dim);
  return std::pow(2.0, (dim + 1) / 2.0) / (ball_volume<double>(dim) * kernel.normalizer());
}

InclusionCheck inclusion_constant_check(const Weight& w, const Ball& ball, int nodes_per_axis) {
  const int n = static_cast<int>(ball.center.size());
  validate_dim(w, n);
  if (!(ball.radius > 0)) throw ConfigError("ball radius must be positive");
  if (nodes_per_axis < 1) throw ConfigError("need at least one node per axis");
  const double r = ball.radius;
  InclusionCheck out;
  out.constant = inclusion_constant(n);
  out.pointwise_margin = std::numeric_limits<double>::infinity();
  const double lhs = std::pow(r, -n);
  const long total = int_pow(nodes_per_axis, n);
  std::vector<double> y(n);
  for (long code = 0; code < total; ++code) {
    long c = code;
    double d2 = 0;
    for (int a = n - 1; a >= 0; --a) {
      const double u = -1 + (2 * (c % nodes_per_axis) + 1.0) / nodes_per_axis;
      c /= nodes_per_axis;
      y[a] = ball.center[a] + r * u;
      d2 += r * u * r * u;
    }
    if (d2 >= r * r) continue;
    ++out.nodes_checked;
    const double rhs = std::pow(2.0, (n + 1) / 2.0) * r / std::pow(r * r + d2, (n + 1) / 2.0);
    const double margin = (rhs - lhs) / lhs;
    if (margin < out.pointwise_margin) out.pointwise_margin = margin;
    if (margin < -1e-12 && !out.violating_node) out.violating_node = y;
  }
  out.ball_average = ball_average(w, ball).value;
  out.poisson_value = poisson_value(w, ball.center, r);
  out.margin = out.constant * out.poisson_value - out.ball_average;
  out.passed = !out.violating_node && out.margin >= 0;
  return out;
}

double extrapolation_exponent(double p) {
  if (!(p > 1)) throw ConfigError("extrapolation exponent needs p > 1");
  return p >= 2 ? 1.0 : 1 / (p - 1);
}

double extrapolation_exponent(long numerator, long denominator) {
  if (denominator <= 0 || numerator <= denominator) throw ConfigError("extrapolation exponent needs p = a/b > 1 with b > 0");
  if (numerator >= 2 * denominator) return 1.0;
  return static_cast<double>(denominator) / static_cast<double>(numerator - denominator);
}

}  // namespace rieszlab
