#pragma once

// Classical and Poisson A_p characteristics as sup-searches. Every reported
// value is the best point found, hence a lower bound for the true supremum.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rieszlab/weights.hpp"

namespace rieszlab {

enum class CharacteristicKind { Classical, Poisson };

std::string to_string(CharacteristicKind kind);

/// Balls B(c, r): centres on a uniform lattice over [-center_extent, center_extent]^n,
/// radii log-spaced on [radius_min, radius_max].
struct BallSearch {
  double center_extent = 2;
  int centers_per_axis = 9;
  double radius_min = 0.05;
  double radius_max = 10;
  int radius_count = 25;
  int refinement_sweeps = 2;
};

/// Half-space points (x, t): x on a uniform lattice over [-center_extent, center_extent]^n
/// (every grid node for sampled weights), t log-spaced on [t_min, t_max].
struct PoissonSearch {
  double center_extent = 2;
  int centers_per_axis = 9;
  double t_min = 0.05;
  double t_max = 10;
  int t_count = 25;
  int refinement_sweeps = 2;
};

struct CharacteristicReport {
  CharacteristicKind kind = CharacteristicKind::Classical;
  double p = 2;
  double value = 1;
  std::vector<double> center;
  /// Ball radius or Poisson time t of the maximizer.
  double scale = 0;
  long samples_searched = 0;
  int refinement_steps = 0;
  std::string weight;
  std::vector<std::string> warnings;
};

/// sup over the ball family of <w>_B <w^{-1/(p-1)}>_B^{p-1}.
CharacteristicReport classical_characteristic(const Weight& w, double p, const BallSearch& search, int dim);

/// sup over the lattice of P_t w(x) (P_t w^{-1/(p-1)}(x))^{p-1}. Power weights
/// whose Poisson integrals diverge raise DivergenceError.
CharacteristicReport poisson_characteristic(const Weight& w, double p, const PoissonSearch& search, int dim);

/// 2^{(n+1)/2} / (|B_1| c_n): the constant in <w>_B <= C'(n) P_r w(a).
double inclusion_constant(int dim);

struct InclusionCheck {
  double constant = 0;
  /// min over nodes of 2^{(n+1)/2} r / (r^2 + |a-y|^2)^{(n+1)/2} - r^{-n}, relative to r^{-n}
  double pointwise_margin = 0;
  std::optional<std::vector<double>> violating_node;
  long nodes_checked = 0;
  double ball_average = 0;
  double poisson_value = 0;
  /// C'(n) P_r w(a) - <w>_B
  double margin = 0;
  bool passed = false;
};

/// Verifies the pointwise kernel bound at midpoint nodes of the ball and the
/// resulting average bound <w>_B <= C'(n) P_r w(a).
InclusionCheck inclusion_constant_check(const Weight& w, const Ball& ball, int nodes_per_axis = 24);

/// 1 for p >= 2, 1/(p-1) for 1 < p < 2.
double extrapolation_exponent(double p);

/// Same for p = numerator / denominator, evaluated as denominator / (numerator -
/// denominator) so that rational exponents such as 4/3 give exact results.
double extrapolation_exponent(long numerator, long denominator);

}  // namespace rieszlab
