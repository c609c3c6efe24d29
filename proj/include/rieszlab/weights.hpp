#pragma once

// Weights: constants, power weights |x|^alpha on R^n, two-valued step weights
// and sampled positive fields on a torus grid. Ball averages and Poisson
// extensions of each kind feed the characteristic searches.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rieszlab/fields.hpp"

namespace rieszlab {

struct ConstantWeight {
  double value = 1;
};

/// coefficient * |x|^alpha on R^dim.
struct PowerWeight {
  double alpha = 0;
  int dim = 1;
  double coefficient = 1;
};

/// `left` where x[axis] < 0, `right` elsewhere.
struct StepWeight {
  double left = 1;
  double right = 1;
  int axis = 0;
  int dim = 1;
};

/// How a power weight was made bounded above and below on a torus.
struct Mollification {
  double alpha = 0;
  /// |x| is replaced by max(cap tanh(|x| / cap), floor) before the power.
  double floor = 0;
  double cap = 0;
  /// Nodes sit at x_j + shift on every axis so none coincides with the origin.
  double shift = 0;
};

struct SampledWeight {
  Grid<double> grid;
  RealArray<double> values;
  /// Set when the samples come from a mollified power weight.
  std::optional<Mollification> mollification;
  std::string source;
};

using Weight = std::variant<ConstantWeight, PowerWeight, StepWeight, SampledWeight>;

/// Ambient dimension of w, or `fallback` for constants.
int weight_dim(const Weight& w, int fallback);

/// Human-readable identifier, stable across runs.
std::string describe(const Weight& w);

/// Pointwise value at x (nearest node for sampled weights, periodic).
double evaluate(const Weight& w, std::span<const double> x);

/// w^q, pointwise.
Weight power(const Weight& w, double q);

/// c * w, c > 0.
Weight scale(const Weight& w, double c);

/// Samples an analytic weight at the grid nodes shifted by half a spacing.
SampledWeight sample_on_grid(const Weight& w, const Grid<double>& grid);

/// Bounded periodic stand-in for |x|^alpha on the torus: nodes shifted by half a
/// spacing, |x| the minimum-image distance, floored at `floor` and rolled off by
/// cap * tanh(|x| / cap). Non-positive floor/cap default to h/2 and L/4.
SampledWeight sample_power_weight(double alpha, const Grid<double>& grid, double floor = 0, double cap = 0);

/// Smooth step between `left` and `right` across x[axis] = 0 of width `width`,
/// periodized by a second transition at the torus boundary.
SampledWeight sample_step_weight(double left, double right, int axis, const Grid<double>& grid, double width);

struct Ball {
  std::vector<double> center;
  double radius = 1;
};

struct BallAverage {
  double value = 0;
  /// Integrand evaluations, or grid cells for sampled weights.
  long nodes = 0;
  /// Estimated relative error of `value`.
  double relative_error = 0;
  bool converged = true;
};

/// Average of w over the ball. Power weights reduce to a radial integral of the
/// spherical fraction inside the ball (closed form in n = 1), step weights to
/// the volume fraction of a ball cap; sampled weights average the grid cells
/// whose nodes lie in the ball (periodic distance).
BallAverage ball_average(const Weight& w, const Ball& ball);

/// P_t w (x). Power weights use the radial route (throws DivergenceError
/// unless -n < alpha < 1), sampled weights the torus kernel route.
double poisson_value(const Weight& w, std::span<const double> x, double t);

}  // namespace rieszlab
