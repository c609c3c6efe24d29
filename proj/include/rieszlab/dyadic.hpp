#pragma once

// Dyadic model on [0, 1): Haar system, scalar and orthogonal-matrix martingale
// transforms, the dyadic A2 characteristic and the bilinear embedding sum.
//
// A tree of depth D has 2^D leaves. Intervals of generations 0..D-1 carry Haar
// functions h_I = |I|^{-1/2} (1_{I+} - 1_{I-}) with I- the left and I+ the
// right half; they are stored in heap order, id(g, m) = 2^g - 1 + m.
// Vector-valued functions are leaf matrices: one row per leaf, one column per
// component.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rieszlab/errors.hpp"
#include "rieszlab/power_iteration.hpp"
#include "rieszlab/random.hpp"

namespace rieszlab {

template <typename Real>
using LeafMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

struct DyadicInterval {
  int generation = 0;
  int index = 0;

  int id() const { return (1 << generation) - 1 + index; }
  static DyadicInterval from_id(int id) {
    int g = 0;
    while ((2 << g) - 1 <= id) ++g;
    return {g, id - ((1 << g) - 1)};
  }
  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

inline int depth_from_leaves(Eigen::Index leaves) {
  if (leaves < 1 || (leaves & (leaves - 1)) != 0)
    throw ConfigError("leaf count must be a power of two");
  int d = 0;
  while ((Eigen::Index{1} << d) < leaves) ++d;
  return d;
}

template <typename Real = double>
struct HaarCoefficients {
  int depth = 0;
  Eigen::Matrix<Real, 1, Eigen::Dynamic> mean;
  /// Row id(I) holds (f, h_I); 2^depth - 1 rows.
  LeafMatrix<Real> coefficients;
};

template <typename Real>
HaarCoefficients<Real> haar_decompose(const LeafMatrix<Real>& leaves) {
  const int depth = depth_from_leaves(leaves.rows());
  HaarCoefficients<Real> out;
  out.depth = depth;
  out.coefficients = LeafMatrix<Real>::Zero((Eigen::Index{1} << depth) - 1, leaves.cols());
  LeafMatrix<Real> level = leaves;
  for (int g = depth - 1; g >= 0; --g) {
    const Eigen::Index count = Eigen::Index{1} << g;
    const Real root_length = std::sqrt(std::ldexp(Real(1), -g));
    LeafMatrix<Real> parent(count, leaves.cols());
    for (Eigen::Index m = 0; m < count; ++m) {
      const auto left = level.row(2 * m);
      const auto right = level.row(2 * m + 1);
      parent.row(m) = (left + right) / 2;
      out.coefficients.row(count - 1 + m) = root_length * (right - left) / 2;
    }
    level = std::move(parent);
  }
  out.mean = level.row(0);
  return out;
}

template <typename Real>
LeafMatrix<Real> haar_reconstruct(const HaarCoefficients<Real>& c) {
  LeafMatrix<Real> level = c.mean;
  for (int g = 0; g < c.depth; ++g) {
    const Eigen::Index count = Eigen::Index{1} << g;
    const Real inv_root_length = std::sqrt(std::ldexp(Real(1), g));
    LeafMatrix<Real> child(2 * count, level.cols());
    for (Eigen::Index m = 0; m < count; ++m) {
      const auto step = inv_root_length * c.coefficients.row(count - 1 + m);
      child.row(2 * m) = level.row(m) - step;
      child.row(2 * m + 1) = level.row(m) + step;
    }
    level = std::move(child);
  }
  return level;
}

/// L^2([0,1)) norm of a leaf function.
template <typename Real>
Real leaf_norm(const LeafMatrix<Real>& f) {
  return std::sqrt(f.squaredNorm() / static_cast<Real>(f.rows()));
}

/// Per-interval symbols: a sign each (scalar mode) or an orthogonal matrix
/// each (orthogonal mode).
template <typename Real = double>
class SigmaSequence {
 public:
  enum class Mode { Scalar, Orthogonal };

  static SigmaSequence signs(Eigen::Matrix<Real, Eigen::Dynamic, 1> s) {
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] != 1 && s[i] != -1) throw ConfigError("scalar symbols must be +1 or -1");
    SigmaSequence out;
    out.mode_ = Mode::Scalar;
    out.depth_ = depth_from_leaves(s.size() + 1);
    out.signs_ = std::move(s);
    return out;
  }

  static SigmaSequence orthogonal(std::vector<LeafMatrix<Real>> q, Real tol = Real(1e-12)) {
    if (q.empty()) throw ConfigError("orthogonal sequence needs at least one symbol");
    const Eigen::Index n = q.front().rows();
    for (const auto& m : q) {
      if (m.rows() != n || m.cols() != n) throw ConfigError("orthogonal symbols must share one square size");
      if ((m.transpose() * m - LeafMatrix<Real>::Identity(n, n)).cwiseAbs().maxCoeff() > tol)
        throw ConfigError("symbol is not orthogonal");
    }
    SigmaSequence out;
    out.mode_ = Mode::Orthogonal;
    out.depth_ = depth_from_leaves(static_cast<Eigen::Index>(q.size()) + 1);
    out.matrices_ = std::move(q);
    return out;
  }

  static SigmaSequence identity(int depth, int valence) {
    const int count = (1 << depth) - 1;
    if (valence == 1) return signs(Eigen::Matrix<Real, Eigen::Dynamic, 1>::Ones(count));
    return orthogonal(std::vector<LeafMatrix<Real>>(count, LeafMatrix<Real>::Identity(valence, valence)));
  }

  template <typename Rng>
  static SigmaSequence random_signs(int depth, Rng& rng) {
    std::bernoulli_distribution coin;
    Eigen::Matrix<Real, Eigen::Dynamic, 1> s((1 << depth) - 1);
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = coin(rng) ? 1 : -1;
    return signs(std::move(s));
  }

  /// Haar-distributed orthogonal symbols: QR of a Gaussian matrix with the
  /// signs of R's diagonal folded into Q.
  template <typename Rng>
  static SigmaSequence random_orthogonal(int depth, int valence, Rng& rng) {
    std::vector<LeafMatrix<Real>> q((1 << depth) - 1);
    for (auto& m : q) m = random_orthogonal_matrix(valence, rng);
    return orthogonal(std::move(q));
  }

  template <typename Rng>
  static LeafMatrix<Real> random_orthogonal_matrix(int n, Rng& rng) {
    std::normal_distribution<Real> normal;
    LeafMatrix<Real> g(n, n);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
    Eigen::HouseholderQR<LeafMatrix<Real>> qr(g);
    LeafMatrix<Real> q = qr.householderQ();
    const LeafMatrix<Real> r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (r(j, j) < 0) q.col(j) *= -1;
    return q;
  }

  Mode mode() const { return mode_; }
  int depth() const { return depth_; }
  int intervals() const { return (1 << depth_) - 1; }
  /// Component count the symbols act on; scalar signs act on any valence.
  std::optional<int> valence() const {
    if (mode_ == Mode::Scalar) return std::nullopt;
    return static_cast<int>(matrices_.front().rows());
  }
  Real sign(int id) const { return signs_[id]; }
  const LeafMatrix<Real>& matrix(int id) const { return matrices_[id]; }
  void set_sign(int id, Real s) { signs_[id] = s; }
  void set_matrix(int id, LeafMatrix<Real> m) { matrices_[id] = std::move(m); }

  SigmaSequence transpose() const {
    SigmaSequence out = *this;
    for (auto& m : out.matrices_) m.transposeInPlace();
    return out;
  }

 private:
  Mode mode_ = Mode::Scalar;
  int depth_ = 0;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> signs_;
  std::vector<LeafMatrix<Real>> matrices_;
};

/// Applies sigma to Haar coefficients in place (c_I -> sigma_I c_I).
template <typename Real>
void apply_symbols(const SigmaSequence<Real>& sigma, LeafMatrix<Real>& coefficients) {
  if (sigma.intervals() != coefficients.rows()) throw ConfigError("symbol count does not match tree depth");
  if (auto v = sigma.valence(); v && *v != coefficients.cols())
    throw ConfigError("orthogonal symbol size does not match the function valence");
  for (int id = 0; id < sigma.intervals(); ++id) {
    if (sigma.mode() == SigmaSequence<Real>::Mode::Scalar) {
      coefficients.row(id) *= sigma.sign(id);
    } else {
      coefficients.row(id) = (sigma.matrix(id) * coefficients.row(id).transpose()).transpose();
    }
  }
}

/// T_sigma f = sum_I sigma_I (f, h_I) h_I; the global average is dropped.
template <typename Real>
LeafMatrix<Real> martingale_transform(const LeafMatrix<Real>& f, const SigmaSequence<Real>& sigma) {
  HaarCoefficients<Real> c = haar_decompose(f);
  if (c.depth != sigma.depth()) throw ConfigError("symbol depth does not match function depth");
  apply_symbols(sigma, c.coefficients);
  c.mean.setZero();
  return haar_reconstruct(c);
}

/// Positive leaf weight with cached averages of w and 1/w over every interval
/// of generations 0..D (heap order, 2^{D+1} - 1 nodes).
template <typename Real = double>
class DyadicWeight {
 public:
  explicit DyadicWeight(Eigen::Matrix<Real, Eigen::Dynamic, 1> leaves)
      : leaves_(std::move(leaves)), depth_(depth_from_leaves(leaves_.size())) {
    for (Eigen::Index i = 0; i < leaves_.size(); ++i)
      if (!(leaves_[i] > 0) || !std::isfinite(static_cast<double>(leaves_[i])))
        throw ConfigError("dyadic weight must be positive and finite on every leaf");
    const int nodes = (2 << depth_) - 1;
    avg_.resize(nodes);
    inv_avg_.resize(nodes);
    const int first_leaf = (1 << depth_) - 1;
    for (Eigen::Index i = 0; i < leaves_.size(); ++i) {
      avg_[first_leaf + i] = leaves_[i];
      inv_avg_[first_leaf + i] = 1 / leaves_[i];
    }
    for (int id = first_leaf - 1; id >= 0; --id) {
      avg_[id] = (avg_[2 * id + 1] + avg_[2 * id + 2]) / 2;
      inv_avg_[id] = (inv_avg_[2 * id + 1] + inv_avg_[2 * id + 2]) / 2;
    }
  }

  int depth() const { return depth_; }
  const Eigen::Matrix<Real, Eigen::Dynamic, 1>& leaves() const { return leaves_; }
  Real average(DyadicInterval I) const { return avg_[I.id()]; }
  Real inverse_average(DyadicInterval I) const { return inv_avg_[I.id()]; }

  DyadicWeight scaled(Real c) const { return DyadicWeight(leaves_ * c); }
  DyadicWeight reciprocal() const { return DyadicWeight(leaves_.cwiseInverse()); }

 private:
  Eigen::Matrix<Real, Eigen::Dynamic, 1> leaves_;
  int depth_;
  std::vector<Real> avg_;
  std::vector<Real> inv_avg_;
};

/// max over tree intervals inside J (J included) of <w>_I <1/w>_I.
template <typename Real>
Real dyadic_a2(const DyadicWeight<Real>& w, DyadicInterval root = {}) {
  Real best = 0;
  for (int g = root.generation; g <= w.depth(); ++g) {
    const int span = 1 << (g - root.generation);
    for (int m = root.index * span; m < (root.index + 1) * span; ++m) {
      const DyadicInterval I{g, m};
      best = std::max(best, w.average(I) * w.inverse_average(I));
    }
  }
  return best;
}

/// Exact leaf averages of |x - x0|^alpha over a depth-D tree (alpha > -1).
template <typename Real>
DyadicWeight<Real> dyadic_power_weight(int depth, Real alpha, Real x0) {
  if (!(alpha > -1)) throw ConfigError("|x - x0|^alpha needs alpha > -1 for leaf averages");
  const Eigen::Index count = Eigen::Index{1} << depth;
  auto antiderivative = [&](Real x) {
    const Real d = x - x0;
    const Real v = std::pow(std::abs(d), alpha + 1) / (alpha + 1);
    return d < 0 ? -v : v;
  };
  Eigen::Matrix<Real, Eigen::Dynamic, 1> leaves(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Real a = static_cast<Real>(i) / count;
    const Real b = static_cast<Real>(i + 1) / count;
    leaves[i] = (antiderivative(b) - antiderivative(a)) * count;
  }
  return DyadicWeight<Real>(std::move(leaves));
}

/// S = M_{w^{1/2}} T_sigma M_{w^{-1/2}} on leaf functions of a given valence.
template <typename Real>
class WeightedTransform {
 public:
  WeightedTransform(const DyadicWeight<Real>& w, SigmaSequence<Real> sigma, int valence)
      : sigma_(std::move(sigma)), sigma_t_(sigma_.transpose()), valence_(valence) {
    if (w.depth() != sigma_.depth()) throw ConfigError("weight and symbol depths differ");
    if (auto v = sigma_.valence(); v && *v != valence)
      throw ConfigError("orthogonal symbol size does not match the function valence");
    sqrt_w_ = w.leaves().cwiseSqrt();
    inv_sqrt_w_ = sqrt_w_.cwiseInverse();
  }

  Eigen::Index size() const { return sqrt_w_.size() * valence_; }
  int valence() const { return valence_; }
  const SigmaSequence<Real>& sigma() const { return sigma_; }

  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  Vector apply(const Vector& x) const { return conjugated(sigma_, x, inv_sqrt_w_, sqrt_w_); }
  Vector apply_transpose(const Vector& x) const { return conjugated(sigma_t_, x, sqrt_w_, inv_sqrt_w_); }
  Vector gram(const Vector& x) const { return apply_transpose(apply(x)); }

 private:
  Vector conjugated(const SigmaSequence<Real>& s, const Vector& x, const Vector& pre, const Vector& post) const {
    const Eigen::Index leaves = sqrt_w_.size();
    LeafMatrix<Real> f = Eigen::Map<const LeafMatrix<Real>>(x.data(), leaves, valence_);
    f = pre.asDiagonal() * f;
    LeafMatrix<Real> y = post.asDiagonal() * martingale_transform(f, s);
    return Eigen::Map<const Vector>(y.data(), y.size());
  }

  SigmaSequence<Real> sigma_;
  SigmaSequence<Real> sigma_t_;
  int valence_;
  Vector sqrt_w_;
  Vector inv_sqrt_w_;
};

template <typename Real = double>
struct TransformNormOptions {
  Real tol = Real(1e-10);
  int max_iterations = 20000;
  std::uint64_t seed = 20140101;
  /// Operators up to this many unknowns fall back to a dense eigensolve when
  /// power iteration exhausts its budget; 0 disables the fallback.
  Eigen::Index dense_fallback_limit = 4096;
};

/// Dense matrix of the weighted transform (columns are images of unit vectors).
template <typename Real>
LeafMatrix<Real> dense_matrix(const WeightedTransform<Real>& op) {
  using Vector = typename WeightedTransform<Real>::Vector;
  LeafMatrix<Real> m(op.size(), op.size());
  Vector e = Vector::Zero(op.size());
  for (Eigen::Index j = 0; j < op.size(); ++j) {
    e.setZero();
    e[j] = 1;
    m.col(j) = op.apply(e);
  }
  return m;
}

namespace detail {

// Largest singular value from the dense Gram matrix; exact for small trees.
template <typename Real>
Real dense_gram_norm(const LeafMatrix<Real>& matrix) {
  Eigen::SelfAdjointEigenSolver<LeafMatrix<Real>> eig(matrix.transpose() * matrix, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), Real(0)));
}

}  // namespace detail

template <typename Real>
NormEstimate<Real> weighted_transform_norm(const WeightedTransform<Real>& op,
                                           const TransformNormOptions<Real>& options = {},
                                           const typename WeightedTransform<Real>::Vector* start = nullptr) {
  using Vector = typename WeightedTransform<Real>::Vector;
  Vector x;
  if (start) {
    x = *start;
  } else {
    auto rng = make_stream(options.seed, 0);
    std::normal_distribution<Real> normal;
    x.resize(op.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
  }
  auto out = power_iteration<Real>([&](const Vector& v) { return op.gram(v); }, std::move(x), options.tol,
                                   options.max_iterations);
  if (!out.converged && op.size() <= options.dense_fallback_limit) {
    out.value = detail::dense_gram_norm(dense_matrix(op));
    out.method = "dense-fallback";
    out.converged = true;
    out.residual = 0;
  }
  return out;
}

template <typename Real>
NormEstimate<Real> weighted_transform_norm(const DyadicWeight<Real>& w, const SigmaSequence<Real>& sigma,
                                           int valence, const TransformNormOptions<Real>& options = {}) {
  return weighted_transform_norm(WeightedTransform<Real>(w, sigma, valence), options);
}

template <typename Real>
NormEstimate<Real> dense_transform_norm(const WeightedTransform<Real>& op) {
  if (op.size() > 4096) throw ConfigError("dense SVD oracle is limited to 4096 unknowns");
  Eigen::BDCSVD<LeafMatrix<Real>> svd(dense_matrix(op));
  NormEstimate<Real> out;
  out.method = "dense-svd";
  out.value = svd.singularValues()(0);
  out.converged = true;
  return out;
}

// ---------------------------------------------------------------------------
// Search for the worst symbol sequence

enum class AdversaryStrategy { Random, Greedy, Exhaustive };

inline std::string to_string(AdversaryStrategy s) {
  switch (s) {
    case AdversaryStrategy::Random: return "random";
    case AdversaryStrategy::Greedy: return "greedy";
    case AdversaryStrategy::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

template <typename Real = double>
struct AdversaryOptions {
  AdversaryStrategy strategy = AdversaryStrategy::Random;
  int trials = 200;
  /// 1 selects scalar signs; larger values select orthogonal symbols of that size.
  int valence = 1;
  int greedy_passes = 1;
  std::uint64_t seed = 20140101;
  TransformNormOptions<Real> norm;
  /// Greedy starting point; defaults to the best random candidate.
  std::optional<SigmaSequence<Real>> start;
};

template <typename Real = double>
struct AdversaryResult {
  SigmaSequence<Real> sigma;
  Real norm = 0;
  /// Best norm among the random candidates (0 when none were drawn).
  Real best_random = 0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

template <typename Real>
SigmaSequence<Real> random_sigma(int depth, int valence, std::uint64_t seed, std::uint64_t trial) {
  auto rng = make_stream(seed, trial + 1);
  return valence == 1 ? SigmaSequence<Real>::random_signs(depth, rng)
                      : SigmaSequence<Real>::random_orthogonal(depth, valence, rng);
}

}  // namespace detail

template <typename Real>
AdversaryResult<Real> sigma_adversary(const DyadicWeight<Real>& w, const AdversaryOptions<Real>& options) {
  const int depth = w.depth();
  const int valence = options.valence;
  if (valence < 1) throw ConfigError("valence must be positive");
  using Vector = typename WeightedTransform<Real>::Vector;

  if (options.strategy == AdversaryStrategy::Exhaustive) {
    if (depth > 4) throw ConfigError("exhaustive search is limited to depth <= 4");
    if (valence != 1) throw ConfigError("exhaustive search enumerates scalar signs only");
    const int count = (1 << depth) - 1;
    AdversaryResult<Real> best{SigmaSequence<Real>::identity(depth, 1), -1, 0, 0, true};
    // sigma and -sigma give the same norm, so the last symbol is pinned to +1.
    const std::uint32_t patterns = count == 0 ? 1u : (1u << (count - 1));
    for (std::uint32_t bits = 0; bits < patterns; ++bits) {
      Eigen::Matrix<Real, Eigen::Dynamic, 1> s(count);
      for (int i = 0; i < count; ++i) s[i] = (i + 1 < count && ((bits >> i) & 1u)) ? -1 : 1;
      auto sigma = SigmaSequence<Real>::signs(std::move(s));
      const Real value = detail::dense_gram_norm(dense_matrix(WeightedTransform<Real>(w, sigma, 1)));
      ++best.evaluations;
      if (value > best.norm) {
        best.norm = value;
        best.sigma = std::move(sigma);
      }
    }
    return best;
  }

  AdversaryResult<Real> best{SigmaSequence<Real>::identity(depth, valence), -1, 0, 0, true};
  for (int trial = 0; trial < options.trials; ++trial) {
    auto sigma = detail::random_sigma<Real>(depth, valence, options.seed, static_cast<std::uint64_t>(trial));
    const auto est = weighted_transform_norm(w, sigma, valence, options.norm);
    ++best.evaluations;
    best.converged = best.converged && est.converged;
    if (est.value > best.norm) {
      best.norm = est.value;
      best.sigma = std::move(sigma);
    }
  }
  best.best_random = std::max(best.norm, Real(0));
  if (options.strategy == AdversaryStrategy::Random) return best;

  // Greedy: change one interval's symbol at a time, keep improvements.
  if (options.start) {
    best.sigma = *options.start;
    const auto est = weighted_transform_norm(w, best.sigma, valence, options.norm);
    best.norm = est.value;
    ++best.evaluations;
  }
  if (best.norm < 0) {
    best.sigma = SigmaSequence<Real>::identity(depth, valence);
    best.norm = weighted_transform_norm(w, best.sigma, valence, options.norm).value;
  }
  Vector warm;
  {
    // top singular vector of the incumbent, reused as a warm start
    const WeightedTransform<Real> op(w, best.sigma, valence);
    auto rng = make_stream(options.seed, 0);
    std::normal_distribution<Real> normal;
    warm.resize(op.size());
    for (Eigen::Index i = 0; i < warm.size(); ++i) warm[i] = normal(rng);
    for (int k = 0; k < 50; ++k) warm = op.gram(warm).normalized();
  }
  for (int pass = 0; pass < options.greedy_passes; ++pass) {
    bool improved = false;
    for (int id = 0; id < best.sigma.intervals(); ++id) {
      std::vector<SigmaSequence<Real>> candidates;
      if (valence == 1) {
        auto c = best.sigma;
        c.set_sign(id, -c.sign(id));
        candidates.push_back(std::move(c));
      } else {
        auto negated = best.sigma;
        negated.set_matrix(id, -best.sigma.matrix(id));
        candidates.push_back(std::move(negated));
        auto reflected = best.sigma;
        LeafMatrix<Real> m = best.sigma.matrix(id);
        m.col(0) *= -1;
        reflected.set_matrix(id, std::move(m));
        candidates.push_back(std::move(reflected));
      }
      for (auto& c : candidates) {
        const WeightedTransform<Real> op(w, c, valence);
        const auto est = weighted_transform_norm(op, options.norm, &warm);
        ++best.evaluations;
        best.converged = best.converged && est.converged;
        if (est.value > best.norm * (1 + Real(1e-12))) {
          best.norm = est.value;
          best.sigma = std::move(c);
          for (int k = 0; k < 5; ++k) warm = op.gram(warm).normalized();
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

// ---------------------------------------------------------------------------

template <typename Real = double>
struct EmbeddingSum {
  Real lhs = 0;
  /// <|f|^2 w>_J + <|g|^2 / w>_J
  Real bracket = 0;
  Real q2 = 0;
  /// lhs / (q2 * bracket)
  Real ratio = 0;
};

/// (1/|J|) sum_{I in D(J)} |(f, h_I)| |(g, h_I)| against Q2(w) times the
/// bracket, with the constant set to 1.
template <typename Real>
EmbeddingSum<Real> bilinear_embedding_sum(const LeafMatrix<Real>& f, const LeafMatrix<Real>& g,
                                          const DyadicWeight<Real>& w, DyadicInterval root = {}) {
  if (f.rows() != g.rows() || f.cols() != g.cols()) throw ConfigError("f and g must share a shape");
  if (f.rows() != w.leaves().size()) throw ConfigError("functions and weight live on different trees");
  const int depth = w.depth();
  if (root.generation < 0 || root.generation > depth || root.index < 0 || root.index >= (1 << root.generation))
    throw ConfigError("root interval is not in the tree");
  const auto cf = haar_decompose(f);
  const auto cg = haar_decompose(g);
  const Real root_length = std::ldexp(Real(1), -root.generation);

  EmbeddingSum<Real> out;
  Real sum = 0;
  for (int gen = root.generation; gen < depth; ++gen) {
    const int span = 1 << (gen - root.generation);
    for (int m = root.index * span; m < (root.index + 1) * span; ++m) {
      const int id = DyadicInterval{gen, m}.id();
      sum += cf.coefficients.row(id).norm() * cg.coefficients.row(id).norm();
    }
  }
  out.lhs = sum / root_length;

  const int leaf_span = 1 << (depth - root.generation);
  Real fw = 0, gw = 0;
  for (int i = root.index * leaf_span; i < (root.index + 1) * leaf_span; ++i) {
    fw += f.row(i).squaredNorm() * w.leaves()[i];
    gw += g.row(i).squaredNorm() / w.leaves()[i];
  }
  out.bracket = (fw + gw) / leaf_span;
  out.q2 = dyadic_a2(w, root);
  out.ratio = out.bracket > 0 ? out.lhs / (out.q2 * out.bracket) : Real(0);
  return out;
}

}  // namespace rieszlab
