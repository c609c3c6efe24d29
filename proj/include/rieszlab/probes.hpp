#pragma once

// Family experiments: the weighted Riesz norm against the Poisson
// characteristic, and the worst dyadic transform norm against dyadic Q2.
// Rows are handed to an optional sink as soon as they are computed.

#include <functional>
#include <string>
#include <vector>

#include "rieszlab/characteristic.hpp"
#include "rieszlab/dyadic.hpp"
#include "rieszlab/poisson.hpp"
#include "rieszlab/riesz.hpp"

namespace rieszlab {

struct RieszProbeMember {
  std::string id;
  double param = 0;
  SampledWeight weight;
};

struct RieszProbeRow {
  std::string weight_id;
  double param = 0;
  double q2_poisson = 0;
  double riesz_norm = 0;
  double ratio = 0;
  int iterations = 0;
  double residual = 0;
  /// "ok", or the error class and message for a failed row.
  std::string status = "ok";
};

/// Mollified periodized power weights, one member per alpha.
std::vector<RieszProbeMember> mollified_power_family(const Grid<double>& grid, const std::vector<double>& alphas);

/// w^s for each s.
std::vector<RieszProbeMember> power_scaling_family(const SampledWeight& base, const std::vector<double>& exponents);

RieszProbeRow linearity_probe_row(const RieszProbeMember& member, const PoissonSearch& search,
                                  const NormOptions<double>& options);

std::vector<RieszProbeRow> linearity_probe(const std::vector<RieszProbeMember>& family, const PoissonSearch& search,
                                           const NormOptions<double>& options,
                                           const std::function<void(const RieszProbeRow&)>& sink = {});

struct DyadicProbeMember {
  std::string id;
  double param = 0;
  DyadicWeight<double> weight;
};

struct DyadicProbeRow {
  std::string weight_id;
  int depth = 0;
  double q2_dyadic = 0;
  double best_sigma_norm = 0;
  double ratio = 0;
  std::string strategy;
  int trials = 0;
  std::string status = "ok";
};

/// Exact leaf averages of |x - x0|^alpha, one member per alpha.
std::vector<DyadicProbeMember> dyadic_power_family(int depth, const std::vector<double>& alphas, double x0);

DyadicProbeRow dyadic_probe_row(const DyadicProbeMember& member, const AdversaryOptions<double>& options);

std::vector<DyadicProbeRow> dyadic_probe(const std::vector<DyadicProbeMember>& family,
                                         const AdversaryOptions<double>& options,
                                         const std::function<void(const DyadicProbeRow&)>& sink = {});

// CSV rendering; numbers in shortest round-trip form.
std::string riesz_probe_header();
std::string to_csv(const RieszProbeRow& row);
std::string dyadic_probe_header();
std::string to_csv(const DyadicProbeRow& row);

/// Sum of `bumps` Gaussians of width `width` with normal amplitudes and centres
/// uniform in the central quarter of the torus; stream `stream` of `seed`.
ScalarField<double> localized_bump_field(const Grid<double>& grid, std::uint64_t seed, std::uint64_t stream,
                                         int bumps = 3, double width = 0.6);

/// k,shell_sum,ratio rows followed by `verdict,<converged|diverged>,<growth ratio>`.
std::string shell_table_csv(const RadialShellTable<double>& table);

}  // namespace rieszlab
