#include "rieszlab/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "rieszlab/errors.hpp"
#include "rieszlab/poisson.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// int_0^theta sin^m(phi) dphi
double sin_power_integral(int m, double theta) {
  if (m == 0) return theta;
  if (m == 1) return 1 - std::cos(theta);
  return -std::pow(std::sin(theta), m - 1) * std::cos(theta) / m +
         double(m - 1) / m * sin_power_integral(m - 2, theta);
}

// Fraction of the sphere |y| = rho (centred at 0) inside the ball B(a, r), n >= 2.
double sphere_fraction(int n, double rho, double a, double r) {
  if (a == 0) return rho < r ? 1.0 : 0.0;
  if (rho + a <= r) return 1;
  if (rho <= a - r || rho >= a + r) return 0;
  const double c0 = std::clamp((rho * rho + a * a - r * r) / (2 * rho * a), -1.0, 1.0);
  const double theta = std::acos(c0);
  return sin_power_integral(n - 2, theta) / sin_power_integral(n - 2, std::numbers::pi);
}

double norm_of(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void require_dim(std::span<const double> x, int dim) {
  if (static_cast<int>(x.size()) != dim) throw ConfigError("point dimension does not match the weight");
}

std::size_t nearest_node(const Grid<double>& g, std::span<const double> x) {
  require_dim(x, g.dim());
  std::size_t flat = 0;
  const int N = g.points_per_axis();
  for (int a = 0; a < g.dim(); ++a) {
    long j = std::lround((x[a] + g.extent() / 2) / g.spacing());
    j = ((j % N) + N) % N;
    flat += static_cast<std::size_t>(j) * g.stride(a);
  }
  return flat;
}

// int over [lo, hi] of |y|^alpha dy, alpha != -1
double power_interval_integral(double alpha, double lo, double hi) {
  auto antiderivative = [alpha](double y) {
    const double s = y < 0 ? -1.0 : 1.0;
    return s * std::pow(std::abs(y), alpha + 1) / (alpha + 1);
  };
  if (alpha <= -1 && lo <= 0 && hi >= 0)
    throw DivergenceError("|x|^" + number(alpha) + " is not integrable over a ball containing 0");
  return antiderivative(hi) - antiderivative(lo);
}

BallAverage power_ball_average(const PowerWeight& w, const Ball& ball) {
  const int n = w.dim;
  const double r = ball.radius;
  const double a = norm_of(ball.center);
  BallAverage out;
  if (n == 1) {
    const double lo = ball.center[0] - r, hi = ball.center[0] + r;
    if (w.alpha == -1) {
      if (lo <= 0 && hi >= 0) throw DivergenceError("|x|^-1 is not integrable over a ball containing 0");
      out.value = w.coefficient * std::abs(std::log(std::abs(hi) / std::abs(lo))) / (2 * r);
    } else {
      out.value = w.coefficient * power_interval_integral(w.alpha, lo, hi) / (2 * r);
    }
    out.nodes = 2;
    return out;
  }
  const double beta = w.alpha + n;
  const double scale = sphere_measure<double>(n) / (ball_volume<double>(n) * std::pow(r, n));
  auto frac = [&](double rho) { return sphere_fraction(n, rho, a, r); };
  std::vector<double> breaks = {std::max(0.0, a - r), std::abs(a - r), a + r};
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0, error = 0;
  long evaluations = 0;
  bool converged = true;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (hi <= lo) continue;
    QuadratureResult<double> q;
    if (beta > 0) {
      // u = rho^beta: rho^{beta-1} d rho = du / beta
      auto g = [&](double u) { return frac(std::pow(u, 1 / beta)) / beta; };
      q = integrate<double>(g, std::pow(lo, beta), std::pow(hi, beta), 1e-12);
    } else {
      if (lo <= 0) throw DivergenceError("|x|^" + number(w.alpha) + " is not integrable over a ball containing 0");
      auto g = [&](double rho) { return std::pow(rho, beta - 1) * frac(rho); };
      q = integrate<double>(g, lo, hi, 1e-12);
    }
    total += q.value;
    error += q.error;
    evaluations += q.evaluations;
    converged = converged && q.converged;
  }
  out.value = w.coefficient * scale * total;
  out.relative_error = total > 0 ? error / total : 0;
  out.nodes = evaluations;
  out.converged = converged && out.relative_error < 1e-3;
  return out;
}

BallAverage step_ball_average(const StepWeight& w, const Ball& ball) {
  const int n = w.dim;
  const double s = -ball.center[w.axis] / ball.radius;  // relative cut position
  double left_fraction;
  if (s <= -1) {
    left_fraction = 0;
  } else if (s >= 1) {
    left_fraction = 1;
  } else {
    // volume fraction {u < s} of the unit ball, u = -cos(phi)
    const double theta = std::acos(-s);
    left_fraction = sin_power_integral(n, theta) / sin_power_integral(n, std::numbers::pi);
  }
  BallAverage out;
  out.value = w.left * left_fraction + w.right * (1 - left_fraction);
  out.nodes = 1;
  return out;
}

BallAverage sampled_ball_average(const SampledWeight& w, const Ball& ball) {
  const Grid<double>& g = w.grid;
  const int n = g.dim();
  const int N = g.points_per_axis();
  const double h = g.spacing();
  const double r = ball.radius;
  std::vector<long> start(n), span_len(n);
  for (int a = 0; a < n; ++a) {
    const long lo = static_cast<long>(std::floor((ball.center[a] - r + g.extent() / 2) / h)) - 1;
    const long hi = static_cast<long>(std::ceil((ball.center[a] + r + g.extent() / 2) / h)) + 1;
    start[a] = hi - lo + 1 >= N ? 0 : lo;
    span_len[a] = std::min<long>(hi - lo + 1, N);
  }
  long total = 1;
  for (int a = 0; a < n; ++a) total *= span_len[a];
  double sum = 0;
  long count = 0;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::size_t flat = 0;
    double d2 = 0;
    for (int a = n - 1; a >= 0; --a) {
      const long j = ((start[a] + c % span_len[a]) % N + N) % N;
      c /= span_len[a];
      flat += static_cast<std::size_t>(j) * g.stride(a);
      const double d = detail::wrap(g.coordinate(static_cast<int>(j)) - ball.center[a], g.extent());
      d2 += d * d;
    }
    if (d2 < r * r) {
      sum += w.values[static_cast<Eigen::Index>(flat)];
      ++count;
    }
  }
  BallAverage out;
  if (count == 0) {
    out.value = w.values[static_cast<Eigen::Index>(nearest_node(g, ball.center))];
    out.nodes = 1;
  } else {
    out.value = sum / count;
    out.nodes = count;
  }
  return out;
}

}  // namespace

int weight_dim(const Weight& w, int fallback) {
  return std::visit(overloaded{
                        [&](const ConstantWeight&) { return fallback; },
                        [](const PowerWeight& p) { return p.dim; },
                        [](const StepWeight& s) { return s.dim; },
                        [](const SampledWeight& s) { return s.grid.dim(); },
                    },
                    w);
}

std::string describe(const Weight& w) {
  return std::visit(overloaded{
                        [](const ConstantWeight& c) { return "const:" + number(c.value); },
                        [](const PowerWeight& p) {
                          std::string s = "power:" + number(p.alpha) + "@n" + std::to_string(p.dim);
                          if (p.coefficient != 1) s += "*" + number(p.coefficient);
                          return s;
                        },
                        [](const StepWeight& s) {
                          return "step:" + number(s.left) + "," + number(s.right) + "," + std::to_string(s.axis);
                        },
                        [](const SampledWeight& s) { return "sampled:" + s.source; },
                    },
                    w);
}

double evaluate(const Weight& w, std::span<const double> x) {
  return std::visit(overloaded{
                        [](const ConstantWeight& c) { return c.value; },
                        [&](const PowerWeight& p) {
                          require_dim(x, p.dim);
                          return p.coefficient * std::pow(norm_of(x), p.alpha);
                        },
                        [&](const StepWeight& s) {
                          require_dim(x, s.dim);
                          return x[s.axis] < 0 ? s.left : s.right;
                        },
                        [&](const SampledWeight& s) {
                          return s.values[static_cast<Eigen::Index>(nearest_node(s.grid, x))];
                        },
                    },
                    w);
}

Weight power(const Weight& w, double q) {
  return std::visit(overloaded{
                        [&](const ConstantWeight& c) -> Weight { return ConstantWeight{std::pow(c.value, q)}; },
                        [&](const PowerWeight& p) -> Weight {
                          return PowerWeight{p.alpha * q, p.dim, std::pow(p.coefficient, q)};
                        },
                        [&](const StepWeight& s) -> Weight {
                          return StepWeight{std::pow(s.left, q), std::pow(s.right, q), s.axis, s.dim};
                        },
                        [&](const SampledWeight& s) -> Weight {
                          SampledWeight out = s;
                          out.values = s.values.pow(q);
                          if (out.mollification) out.mollification->alpha *= q;
                          out.source = s.source + "^" + number(q);
                          return out;
                        },
                    },
                    w);
}

Weight scale(const Weight& w, double c) {
  if (!(c > 0)) throw ConfigError("weight scale factor must be positive");
  return std::visit(overloaded{
                        [&](const ConstantWeight& k) -> Weight { return ConstantWeight{k.value * c}; },
                        [&](const PowerWeight& p) -> Weight { return PowerWeight{p.alpha, p.dim, p.coefficient * c}; },
                        [&](const StepWeight& s) -> Weight { return StepWeight{s.left * c, s.right * c, s.axis, s.dim}; },
                        [&](const SampledWeight& s) -> Weight {
                          SampledWeight out = s;
                          out.values = s.values * c;
                          out.source = number(c) + "*" + s.source;
                          return out;
                        },
                    },
                    w);
}

SampledWeight sample_on_grid(const Weight& w, const Grid<double>& grid) {
  if (const auto* s = std::get_if<SampledWeight>(&w)) {
    if (!(s->grid == grid)) throw ConfigError("sampled weight lives on a different grid");
    return *s;
  }
  const int dim = weight_dim(w, grid.dim());
  if (dim != grid.dim()) throw ConfigError("weight dimension does not match the grid");
  RealArray<double> values(grid.point_count());
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    auto x = grid.position(i);
    for (double& v : x) v += grid.spacing() / 2;
    values[static_cast<Eigen::Index>(i)] = evaluate(w, x);
  }
  detail::require_positive_weight(values, grid.point_count());
  return SampledWeight{grid, std::move(values), std::nullopt, describe(w)};
}

SampledWeight sample_power_weight(double alpha, const Grid<double>& grid, double floor, double cap) {
  if (!(floor > 0)) floor = grid.spacing() / 2;
  if (!(cap > 0)) cap = grid.extent() / 4;
  const double shift = grid.spacing() / 2;
  RealArray<double> values(grid.point_count());
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    double r2 = 0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double x = detail::wrap(grid.coordinate(grid.index(i, a)) + shift, grid.extent());
      r2 += x * x;
    }
    const double rho = std::max(cap * std::tanh(std::sqrt(r2) / cap), floor);
    values[static_cast<Eigen::Index>(i)] = std::pow(rho, alpha);
  }
  SampledWeight out{grid, std::move(values), Mollification{alpha, floor, cap, shift}, ""};
  out.source = "mollified-power:" + number(alpha);
  return out;
}

SampledWeight sample_step_weight(double left, double right, int axis, const Grid<double>& grid, double width) {
  if (!(left > 0) || !(right > 0)) throw ConfigError("step weight values must be positive");
  if (axis < 0 || axis >= grid.dim()) throw ConfigError("step axis out of range");
  if (!(width > 0)) throw ConfigError("step width must be positive");
  const double L = grid.extent();
  RealArray<double> values(grid.point_count());
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    const double x = grid.coordinate(grid.index(i, axis));
    const double s = 0.5 + 0.5 * std::tanh(std::sin(2 * std::numbers::pi * x / L) * L / (2 * std::numbers::pi * width));
    values[static_cast<Eigen::Index>(i)] = left + (right - left) * s;
  }
  return SampledWeight{grid, std::move(values), std::nullopt,
                       "smooth-step:" + number(left) + "," + number(right) + "," + std::to_string(axis)};
}

BallAverage ball_average(const Weight& w, const Ball& ball) {
  if (!(ball.radius > 0)) throw ConfigError("ball radius must be positive");
  const int dim = weight_dim(w, static_cast<int>(ball.center.size()));
  if (static_cast<int>(ball.center.size()) != dim) throw ConfigError("ball centre dimension does not match the weight");
  return std::visit(overloaded{
                        [](const ConstantWeight& c) { return BallAverage{c.value, 1, 0, true}; },
                        [&](const PowerWeight& p) { return power_ball_average(p, ball); },
                        [&](const StepWeight& s) { return step_ball_average(s, ball); },
                        [&](const SampledWeight& s) { return sampled_ball_average(s, ball); },
                    },
                    w);
}

double poisson_value(const Weight& w, std::span<const double> x, double t) {
  if (!(t > 0)) throw ConfigError("Poisson extension needs t > 0");
  return std::visit(overloaded{
                        [](const ConstantWeight& c) { return c.value; },
                        [&](const PowerWeight& p) {
                          require_dim(x, p.dim);
                          return p.coefficient * power_weight_extension<double>(p.alpha, p.dim, norm_of(x), t);
                        },
                        [&](const StepWeight& s) {
                          require_dim(x, s.dim);
                          const double a = std::atan(x[s.axis] / t) / std::numbers::pi;
                          return s.left * (0.5 - a) + s.right * (0.5 + a);
                        },
                        [&](const SampledWeight& s) {
                          require_dim(x, s.grid.dim());
                          return poisson_kernel_value_at<double>(s.grid, s.values, x, t);
                        },
                    },
                    w);
}

}  // namespace rieszlab
