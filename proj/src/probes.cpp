#include "rieszlab/probes.hpp"

#include <random>
#include <sstream>

#include "rieszlab/errors.hpp"
#include "rieszlab/field_io.hpp"

namespace rieszlab {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename Row, typename Body>
Row guarded(Row row, Body&& body) {
  try {
    body(row);
  } catch (const DivergenceError& e) {
    row.status = std::string("divergence: ") + e.what();
  } catch (const NonConvergence& e) {
    row.status = std::string("nonconvergence: ") + e.what();
  }
  return row;
}

}  // namespace

std::vector<RieszProbeMember> mollified_power_family(const Grid<double>& grid, const std::vector<double>& alphas) {
  std::vector<RieszProbeMember> out;
  for (double a : alphas) {
    SampledWeight w = sample_power_weight(a, grid);
    out.push_back({w.source, a, std::move(w)});
  }
  return out;
}

std::vector<RieszProbeMember> power_scaling_family(const SampledWeight& base, const std::vector<double>& exponents) {
  std::vector<RieszProbeMember> out;
  for (double s : exponents) {
    auto w = std::get<SampledWeight>(power(base, s));
    out.push_back({w.source, s, std::move(w)});
  }
  return out;
}

RieszProbeRow linearity_probe_row(const RieszProbeMember& member, const PoissonSearch& search,
                                  const NormOptions<double>& options) {
  RieszProbeRow row;
  row.weight_id = member.id;
  row.param = member.param;
  return guarded(row, [&](RieszProbeRow& r) {
    const auto q = poisson_characteristic(member.weight, 2.0, search, member.weight.grid.dim());
    r.q2_poisson = q.value;
    const auto norm = weighted_riesz_norm(member.weight.values, member.weight.grid, options);
    r.riesz_norm = norm.value;
    r.iterations = norm.iterations;
    r.residual = norm.residual;
    r.ratio = norm.value / q.value;
    if (!norm.converged) r.status = "nonconvergence: power iteration budget exhausted";
  });
}

std::vector<RieszProbeRow> linearity_probe(const std::vector<RieszProbeMember>& family, const PoissonSearch& search,
                                           const NormOptions<double>& options,
                                           const std::function<void(const RieszProbeRow&)>& sink) {
  std::vector<RieszProbeRow> rows;
  for (const auto& member : family) {
    rows.push_back(linearity_probe_row(member, search, options));
    if (sink) sink(rows.back());
  }
  return rows;
}

std::vector<DyadicProbeMember> dyadic_power_family(int depth, const std::vector<double>& alphas, double x0) {
  std::vector<DyadicProbeMember> out;
  for (double a : alphas) {
    out.push_back({"dyadic-power:" + format_double(a), a, dyadic_power_weight<double>(depth, a, x0)});
  }
  return out;
}

DyadicProbeRow dyadic_probe_row(const DyadicProbeMember& member, const AdversaryOptions<double>& options) {
  DyadicProbeRow row;
  row.weight_id = member.id;
  row.depth = member.weight.depth();
  row.strategy = to_string(options.strategy);
  row.trials = options.trials;
  return guarded(row, [&](DyadicProbeRow& r) {
    r.q2_dyadic = dyadic_a2(member.weight);
    const auto best = sigma_adversary(member.weight, options);
    r.best_sigma_norm = best.norm;
    r.ratio = best.norm / r.q2_dyadic;
    if (!best.converged) r.status = "nonconvergence: some transform norms did not converge";
  });
}

std::vector<DyadicProbeRow> dyadic_probe(const std::vector<DyadicProbeMember>& family,
                                         const AdversaryOptions<double>& options,
                                         const std::function<void(const DyadicProbeRow&)>& sink) {
  std::vector<DyadicProbeRow> rows;
  for (const auto& member : family) {
    rows.push_back(dyadic_probe_row(member, options));
    if (sink) sink(rows.back());
  }
  return rows;
}

std::string riesz_probe_header() {
  return "weight_id,alpha_or_param,q2_poisson,riesz_norm,ratio,iterations,residual,status";
}

std::string to_csv(const RieszProbeRow& r) {
  std::ostringstream s;
  s << csv_field(r.weight_id) << ',' << format_double(r.param) << ',' << format_double(r.q2_poisson) << ','
    << format_double(r.riesz_norm) << ',' << format_double(r.ratio) << ',' << r.iterations << ','
    << format_double(r.residual) << ',' << csv_field(r.status);
  return s.str();
}

std::string dyadic_probe_header() { return "weight_id,depth,q2_dyadic,best_sigma_norm,ratio,strategy,trials,status"; }

std::string to_csv(const DyadicProbeRow& r) {
  std::ostringstream s;
  s << csv_field(r.weight_id) << ',' << r.depth << ',' << format_double(r.q2_dyadic) << ','
    << format_double(r.best_sigma_norm) << ',' << format_double(r.ratio) << ',' << r.strategy << ',' << r.trials
    << ',' << csv_field(r.status);
  return s.str();
}

ScalarField<double> localized_bump_field(const Grid<double>& grid, std::uint64_t seed, std::uint64_t stream,
                                         int bumps, double width) {
  if (bumps < 1 || !(width > 0)) throw ConfigError("bump field needs at least one bump of positive width");
  auto rng = make_stream(seed, stream);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(-grid.extent() / 8, grid.extent() / 8);
  std::vector<std::vector<double>> centers(bumps, std::vector<double>(grid.dim()));
  std::vector<std::complex<double>> amplitudes(bumps);
  for (int j = 0; j < bumps; ++j) {
    for (double& c : centers[j]) c = uniform(rng);
    const double re = normal(rng), im = normal(rng);
    amplitudes[j] = {re, im};
  }
  return ScalarField<double>::from_function(grid, [&](const std::vector<double>& x) {
    std::complex<double> v = 0;
    for (int j = 0; j < bumps; ++j) {
      double d2 = 0;
      for (int a = 0; a < grid.dim(); ++a) d2 += (x[a] - centers[j][a]) * (x[a] - centers[j][a]);
      v += amplitudes[j] * std::exp(-d2 / (2 * width * width));
    }
    return v;
  });
}

std::string shell_table_csv(const RadialShellTable<double>& table) {
  std::ostringstream s;
  s << "k,shell_sum,ratio\n";
  for (std::size_t k = 0; k < table.shell_sums.size(); ++k) {
    s << k << ',' << format_double(table.shell_sums[k]) << ',';
    if (k > 0) s << format_double(table.ratio(k));
    s << '\n';
  }
  s << "verdict," << (table.diverged ? "diverged" : "converged") << ',' << format_double(table.growth_ratio_estimate)
    << '\n';
  return s.str();
}

}  // namespace rieszlab
