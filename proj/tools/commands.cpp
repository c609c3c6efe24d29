#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "rieszlab/bellman.hpp"
#include "rieszlab/characteristic.hpp"
#include "rieszlab/ellipse.hpp"
#include "rieszlab/errors.hpp"
#include "rieszlab/field_io.hpp"
#include "rieszlab/probes.hpp"
#include "rieszlab/weight_spec.hpp"

namespace rieszlab::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kConfigError = 2;
constexpr int kNumericalOutcome = 3;
constexpr int kInvariantViolation = 4;

int status = 0;

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Appends lines to a file (or stdout), flushing after each.
class RowWriter {
 public:
  explicit RowWriter(const std::string& path) : path_(path) {
    if (path != "-") {
      file_.open(path, std::ios::trunc);
      if (!file_) throw ConfigError("cannot open '" + path + "' for writing");
    }
  }
  void line(const std::string& s) {
    std::ostream& out = path_ == "-" ? std::cout : file_;
    out << s << '\n' << std::flush;
  }

 private:
  std::string path_;
  std::ofstream file_;
};

// ---------------------------------------------------------------------------
// Flat `key = value` configuration files; `#` starts a comment.

class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    KeyValueConfig cfg;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      if (cfg.values_.count(key)) throw ConfigError(path + ":" + std::to_string(number) + ": duplicate key " + key);
      cfg.values_[key] = trim(trimmed.substr(eq + 1));
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string required(const std::string& key) {
    if (!has(key)) throw ConfigError("config is missing required key '" + key + "'");
    return text(key, "");
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? parse(key, text(key, "")) : (used_.insert(key), fallback);
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    if (v != std::floor(v)) throw ConfigError("config key '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    std::vector<double> out;
    std::stringstream ss(text(key, ""));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse(key, trim(item)));
    if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
    return out;
  }

  void reject_unused() const {
    for (const auto& [key, value] : values_)
      if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static double parse(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

// ---------------------------------------------------------------------------

AdversaryStrategy parse_strategy(const std::string& s) {
  if (s == "random") return AdversaryStrategy::Random;
  if (s == "greedy") return AdversaryStrategy::Greedy;
  if (s == "exhaustive") return AdversaryStrategy::Exhaustive;
  throw ConfigError("unknown strategy '" + s + "' (random|greedy|exhaustive)");
}

/// Grid-resident version of a weight spec: power weights are mollified and
/// periodized, sampled weights keep their own grid.
SampledWeight materialize(const Weight& w, const Grid<double>& grid) {
  if (const auto* p = std::get_if<PowerWeight>(&w)) return sample_power_weight(p->alpha, grid);
  return sample_on_grid(w, grid);
}

json report_json(const CharacteristicReport& r) {
  json j;
  j["command"] = "characteristic";
  j["weight"] = r.weight;
  j["kind"] = to_string(r.kind);
  j["p"] = r.p;
  j["value"] = r.value;
  j["center"] = r.center;
  j["scale"] = r.scale;
  j["samples_searched"] = r.samples_searched;
  j["refinement_steps"] = r.refinement_steps;
  j["warnings"] = r.warnings;
  return j;
}

// ---------------------------------------------------------------------------

void add_characteristic(CLI::App& app) {
  struct Args {
    std::string weight;
    int n = 1;
    double p = 2;
    std::string mode = "classical";
    double center_extent = 2;
    int centers = 9;
    double scale_min = 0.05;
    double scale_max = 10;
    int scales = 25;
    int sweeps = 2;
    std::string output = "-";
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("characteristic", "classical or Poisson A_p characteristic of a weight");
  sub->add_option("--weight", args->weight, "const:c | power:alpha | step:a,b[,axis] | sampled:path")->required();
  sub->add_option("--n", args->n, "ambient dimension");
  sub->add_option("--p", args->p, "exponent p > 1");
  sub->add_option("--mode", args->mode, "classical | poisson")->check(CLI::IsMember({"classical", "poisson"}));
  sub->add_option("--center-extent", args->center_extent, "centre lattice covers [-e, e]^n");
  sub->add_option("--centers", args->centers, "centre lattice points per axis");
  sub->add_option("--scale-min", args->scale_min, "smallest radius or t");
  sub->add_option("--scale-max", args->scale_max, "largest radius or t");
  sub->add_option("--scales", args->scales, "number of log-spaced radii or t values");
  sub->add_option("--sweeps", args->sweeps, "refinement sweeps");
  sub->add_option("--output", args->output, "JSON output path, - for stdout");
  sub->callback([args] {
    const Weight w = parse_weight_spec(args->weight, args->n);
    try {
      CharacteristicReport r;
      if (args->mode == "classical") {
        r = classical_characteristic(w, args->p,
                                     BallSearch{args->center_extent, args->centers, args->scale_min, args->scale_max,
                                                args->scales, args->sweeps},
                                     args->n);
      } else {
        r = poisson_characteristic(w, args->p,
                                   PoissonSearch{args->center_extent, args->centers, args->scale_min,
                                                 args->scale_max, args->scales, args->sweeps},
                                   args->n);
      }
      emit(args->output, dump(report_json(r)));
    } catch (const DivergenceError& e) {
      json j;
      j["command"] = "characteristic";
      j["weight"] = describe(w);
      j["kind"] = args->mode;
      j["p"] = args->p;
      j["outcome"] = "divergence";
      j["message"] = e.what();
      emit(args->output, dump(j));
      status = kNumericalOutcome;
    }
  });
}

void add_semigroup_check(CLI::App& app) {
  struct Args {
    int n = 2;
    int N = 128;
    double L = 16;
    double t_min = 1e-3;
    double t_max = 1e2;
    int count = 200;
    std::uint64_t seed = 1;
    std::string f_path;
    std::string g_path;
    std::string output = "-";
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("semigroup-check", "compare (g, R f) with its Poisson semigroup representation");
  sub->add_option("--n", args->n, "dimension");
  sub->add_option("--N", args->N, "points per axis");
  sub->add_option("--L", args->L, "period");
  sub->add_option("--t-min", args->t_min, "smallest t");
  sub->add_option("--t-max", args->t_max, "largest t");
  sub->add_option("--count", args->count, "number of log-spaced t nodes");
  sub->add_option("--seed", args->seed, "seed for the built-in localized fields");
  sub->add_option("--f", args->f_path, "scalar field file for f (mean is removed)");
  sub->add_option("--g", args->g_path, "vector field file for g");
  sub->add_option("--output", args->output, "JSON output path, - for stdout");
  sub->callback([args] {
    const Grid<double> grid(args->n, args->N, args->L);
    ScalarField<double> f = args->f_path.empty() ? localized_bump_field(grid, args->seed, 0)
                                                 : read_scalar_field(args->f_path);
    f = remove_mean(f);
    std::vector<ScalarField<double>> comps;
    if (args->g_path.empty()) {
      for (int k = 0; k < f.grid().dim(); ++k) comps.push_back(localized_bump_field(f.grid(), args->seed, 1 + k));
    }
    const VectorField<double> g = args->g_path.empty() ? VectorField<double>(comps) : read_vector_field(args->g_path);
    const LogTimeGrid<double> q{args->t_min, args->t_max, args->count};
    const auto r = semigroup_identity_check(f, g, q, [](const ScalarField<double>& h) { return riesz_apply(h); });
    json j;
    j["command"] = "semigroup-check";
    j["grid"] = {{"n", f.grid().dim()}, {"N", f.grid().points_per_axis()}, {"L", f.grid().extent()}};
    j["t"] = {{"min", q.t_min}, {"max", q.t_max}, {"count", q.count}};
    j["lhs"] = {r.lhs.real(), r.lhs.imag()};
    j["rhs"] = {r.rhs.real(), r.rhs.imag()};
    j["relative_error"] = r.relative_error;
    j["truncation_estimate"] = r.truncation_estimate;
    emit(args->output, dump(j));
  });
}

void add_divergence(CLI::App& app) {
  struct Args {
    double alpha = 0;
    int n = 2;
    double t = 1;
    int shells = 32;
    std::string output = "-";
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("divergence", "dyadic shell analysis of the Poisson integral of |x|^alpha");
  sub->add_option("--alpha", args->alpha, "power")->required();
  sub->add_option("--n", args->n, "dimension");
  sub->add_option("--t", args->t, "height t > 0");
  sub->add_option("--shells", args->shells, "number of shells (>= 8)");
  sub->add_option("--output", args->output, "CSV output path, - for stdout");
  sub->callback([args] {
    const auto table = radial_divergence_analysis<double>(args->alpha, args->n, args->t, args->shells);
    emit(args->output, shell_table_csv(table));
  });
}

void add_riesz_norm(CLI::App& app) {
  struct Args {
    std::string weight;
    int n = 2;
    int N = 32;
    double L = 16;
    double tol = 1e-10;
    int max_iterations = 5000;
    std::uint64_t seed = 20140101;
    bool dense = false;
    std::string output = "-";
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("riesz-norm", "weighted norm of the Riesz vector on mean-zero fields");
  sub->add_option("--weight", args->weight, "weight spec; power weights are mollified and periodized")->required();
  sub->add_option("--n", args->n, "dimension");
  sub->add_option("--N", args->N, "points per axis");
  sub->add_option("--L", args->L, "period");
  sub->add_option("--tol", args->tol, "power-iteration tolerance");
  sub->add_option("--max-iter", args->max_iterations, "power-iteration budget");
  sub->add_option("--seed", args->seed, "start-vector seed");
  sub->add_flag("--dense", args->dense, "also compute the dense-SVD value (at most 4096 points)");
  sub->add_option("--output", args->output, "JSON output path, - for stdout");
  sub->callback([args] {
    const Weight spec = parse_weight_spec(args->weight, args->n);
    const Grid<double> grid = std::holds_alternative<SampledWeight>(spec) ? std::get<SampledWeight>(spec).grid
                                                                           : Grid<double>(args->n, args->N, args->L);
    const SampledWeight w = materialize(spec, grid);
    const auto est = weighted_riesz_norm(w.values, grid, NormOptions<double>{args->tol, args->max_iterations, args->seed});
    json j;
    j["command"] = "riesz-norm";
    j["weight"] = w.source;
    j["grid"] = {{"n", grid.dim()}, {"N", grid.points_per_axis()}, {"L", grid.extent()}};
    j["value"] = est.value;
    j["iterations"] = est.iterations;
    j["residual"] = est.residual;
    j["method"] = est.method;
    j["converged"] = est.converged;
    if (args->dense) j["dense_value"] = dense_weighted_riesz_norm(w.values, grid).value;
    emit(args->output, dump(j));
    if (!est.converged) status = kNumericalOutcome;
  });
}

AdversaryOptions<double> adversary_options(const std::string& strategy, int trials, int valence, int greedy_passes,
                                           std::uint64_t seed, double tol, int max_iterations) {
  AdversaryOptions<double> o;
  o.strategy = parse_strategy(strategy);
  o.trials = trials;
  o.valence = valence;
  o.greedy_passes = greedy_passes;
  o.seed = seed;
  o.norm.tol = tol;
  o.norm.max_iterations = max_iterations;
  o.norm.seed = seed;
  return o;
}

void add_dyadic_probe(CLI::App& app) {
  struct Args {
    int depth = 10;
    std::vector<double> alphas = {0, -0.5, -0.9};
    double x0 = 0;
    int trials = 200;
    int valence = 2;
    std::string strategy = "random";
    int greedy_passes = 1;
    std::uint64_t seed = 20140101;
    double tol = 1e-10;
    int max_iterations = 20000;
    std::string output = "-";
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("dyadic-probe", "worst martingale-transform norm against dyadic Q2");
  sub->add_option("--depth", args->depth, "tree depth");
  sub->add_option("--alphas", args->alphas, "powers of |x - x0|")->delimiter(',');
  sub->add_option("--x0", args->x0, "singularity location in [0, 1]");
  sub->add_option("--trials", args->trials, "random symbol sequences per weight");
  sub->add_option("--valence", args->valence, "1 for signs, >1 for orthogonal symbols of that size");
  sub->add_option("--strategy", args->strategy, "random | greedy | exhaustive");
  sub->add_option("--greedy-passes", args->greedy_passes, "greedy sweeps over the tree");
  sub->add_option("--seed", args->seed, "seed");
  sub->add_option("--tol", args->tol, "power-iteration tolerance");
  sub->add_option("--max-iter", args->max_iterations, "power-iteration budget");
  sub->add_option("--output", args->output, "CSV output path, - for stdout");
  sub->callback([args] {
    const auto options = adversary_options(args->strategy, args->trials, args->valence, args->greedy_passes,
                                           args->seed, args->tol, args->max_iterations);
    const auto family = dyadic_power_family(args->depth, args->alphas, args->x0);
    RowWriter out(args->output);
    out.line(dyadic_probe_header());
    dyadic_probe(family, options, [&](const DyadicProbeRow& row) {
      out.line(to_csv(row));
      if (row.status != "ok") status = kNumericalOutcome;
    });
  });
}

void add_ellipse(CLI::App& app) {
  struct Args {
    std::string matrix;
    double tau_min = 1e-6;
    double tau_max = 1e6;
    int scan = 121;
    std::string output = "-";
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("ellipse", "certified tau for the ellipse lemma");
  sub->add_option("--matrix", args->matrix, "file: header `m l k`, then the symmetric matrix")->required();
  sub->add_option("--tau-min", args->tau_min, "scan lower end");
  sub->add_option("--tau-max", args->tau_max, "scan upper end");
  sub->add_option("--scan", args->scan, "scan points");
  sub->add_option("--output", args->output, "JSON output path, - for stdout");
  sub->callback([args] {
    std::ifstream in(args->matrix);
    if (!in) throw ConfigError("cannot open matrix file '" + args->matrix + "'");
    EllipseProblem<double> p;
    if (!(in >> p.m >> p.l >> p.k)) throw ConfigError("matrix file: expected header `m l k`");
    if (p.m < 1 || p.l < 1 || p.k < 0) throw ConfigError("matrix file: need m >= 1, l >= 1, k >= 0");
    const int d = p.m + p.l + p.k;
    p.A.resize(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (!(in >> p.A(i, j))) throw ConfigError("matrix file: expected a " + std::to_string(d) + "x" +
                                                  std::to_string(d) + " matrix");
    std::string extra;
    if (in >> extra) throw ConfigError("matrix file: trailing content");
    EllipseOptions<double> options;
    options.tau_min = args->tau_min;
    options.tau_max = args->tau_max;
    options.scan_points = args->scan;
    json j;
    j["command"] = "ellipse";
    j["partition"] = {p.m, p.l, p.k};
    try {
      const auto cert = ellipse_solve(p, options);
      j["tau"] = cert.tau;
      j["residual"] = cert.residual;
      j["iterations"] = cert.iterations;
    } catch (const HypothesisViolated& e) {
      j["outcome"] = "hypothesis-violated";
      j["value"] = e.value;
      j["witness"] = std::vector<double>(e.witness.data(), e.witness.data() + e.witness.size());
      status = kConfigError;
    } catch (const NoFeasibleTau& e) {
      j["outcome"] = "no-feasible-tau";
      j["tau_range"] = {e.tau_min, e.tau_max};
      j["best_residual"] = e.best_residual;
      status = kNumericalOutcome;
    }
    emit(args->output, dump(j));
  });
}

void add_bellman_check(CLI::App& app) {
  struct Args {
    int points = 1000;
    int n = 2;
    double Q = 4;
    std::uint64_t seed = 7;
    std::string output = "-";
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("bellman-check", "closed-form Hessian and concavity checks of the candidate");
  sub->add_option("--points", args->points, "random domain points");
  sub->add_option("--n", args->n, "components of y");
  sub->add_option("--Q", args->Q, "domain parameter Q > 1");
  sub->add_option("--seed", args->seed, "seed");
  sub->add_option("--output", args->output, "JSON output path, - for stdout");
  sub->callback([args] {
    const auto s = candidate_sweep<double>(args->points, args->n, args->Q, args->seed);
    json j;
    j["command"] = "bellman-check";
    j["points"] = s.points;
    j["n"] = args->n;
    j["Q"] = args->Q;
    j["all_inside"] = s.all_inside;
    j["max_fd_relative_error"] = s.max_fd_relative_error;
    j["min_eigenvalue"] = s.min_eigenvalue;
    j["max_degenerate_form"] = s.max_degenerate_form;
    j["worst_x_only_margin"] = s.worst_x_only_margin;
    emit(args->output, dump(j));
    if (!s.all_inside) status = kInvariantViolation;
  });
}

void run_riesz_sweep(KeyValueConfig& cfg, std::uint64_t seed, const std::string& output) {
  const Grid<double> grid(cfg.integer("n", 2), cfg.integer("N", 64), cfg.number("L", 16));
  PoissonSearch search;
  search.t_min = cfg.number("t_min", 0.05);
  search.t_max = cfg.number("t_max", 16);
  search.t_count = cfg.integer("t_count", 25);
  search.refinement_sweeps = cfg.integer("sweeps", 2);
  NormOptions<double> options{cfg.number("tol", 1e-10), cfg.integer("max_iterations", 5000), seed};
  std::vector<RieszProbeMember> family;
  if (cfg.has("exponents")) {
    const SampledWeight base = sample_power_weight(cfg.number("base_alpha", 1.5), grid);
    family = power_scaling_family(base, cfg.list("exponents", {}));
  } else {
    family = mollified_power_family(grid, cfg.list("alphas", {0, 0.5, 1, 1.5, 2}));
  }
  cfg.reject_unused();
  RowWriter out(output);
  out.line(riesz_probe_header());
  linearity_probe(family, search, options, [&](const RieszProbeRow& row) {
    out.line(to_csv(row));
    if (row.status != "ok") status = kNumericalOutcome;
  });
}

void run_dyadic_sweep(KeyValueConfig& cfg, std::uint64_t seed, const std::string& output) {
  const int depth = cfg.integer("depth", 10);
  const auto alphas = cfg.list("alphas", {0, -0.5, -0.9});
  const double x0 = cfg.number("x0", 0);
  const auto options = adversary_options(cfg.text("strategy", "random"), cfg.integer("trials", 200),
                                         cfg.integer("valence", 2), cfg.integer("greedy_passes", 1), seed,
                                         cfg.number("tol", 1e-10), cfg.integer("max_iterations", 20000));
  cfg.reject_unused();
  RowWriter out(output);
  out.line(dyadic_probe_header());
  dyadic_probe(dyadic_power_family(depth, alphas, x0), options, [&](const DyadicProbeRow& row) {
    out.line(to_csv(row));
    if (row.status != "ok") status = kNumericalOutcome;
  });
}

void add_sweep(CLI::App& app) {
  struct Args {
    std::string config;
    std::string output;
  };
  auto args = std::make_shared<Args>();
  auto* sub = app.add_subcommand("sweep", "run a weight-family probe described by a config file");
  sub->add_option("--config", args->config, "key = value file")->required();
  sub->add_option("--output", args->output, "CSV output path (overrides the config's output key)");
  sub->callback([args] {
    KeyValueConfig cfg = KeyValueConfig::load(args->config);
    const std::string kind = cfg.required("kind");
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 20140101));
    std::string output = cfg.text("output", "-");
    if (!args->output.empty()) output = args->output;
    if (kind == "riesz") run_riesz_sweep(cfg, seed, output);
    else if (kind == "dyadic") run_dyadic_sweep(cfg, seed, output);
    else throw ConfigError("config kind must be riesz or dyadic, got '" + kind + "'");
  });
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"rieszlab: weighted Riesz transform and Poisson A2 experiments"};
  app.require_subcommand(1);
  add_characteristic(app);
  add_semigroup_check(app);
  add_divergence(app);
  add_riesz_norm(app);
  add_dyadic_probe(app);
  add_ellipse(app);
  add_bellman_check(app);
  add_sweep(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return kNumericalOutcome;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kNumericalOutcome;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}

}  // namespace rieszlab::cli
