#pragma once

// The Riesz vector R = grad A^{-1} as a Fourier multiplier on the torus, and
// estimation of the operator norm of w^{1/2} R w^{-1/2} on L^2.

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rieszlab/errors.hpp"
#include "rieszlab/fields.hpp"
#include "rieszlab/power_iteration.hpp"
#include "rieszlab/random.hpp"

namespace rieszlab {

/// Symbols i xi_k / |xi|, with the value 0 at xi = 0.
template <typename Real>
std::vector<Multiplier<Real>> riesz_multipliers(const Grid<Real>& grid) {
  std::vector<Multiplier<Real>> out;
  for (int k = 0; k < grid.dim(); ++k) {
    out.push_back(Multiplier<Real>::from_symbol(grid, [k](std::span<const Real> xi) {
      Real r2 = 0;
      for (Real v : xi) r2 += v * v;
      if (r2 == 0) return std::complex<Real>(0);
      return std::complex<Real>(0, xi[k] / std::sqrt(r2));
    }));
  }
  return out;
}

/// Hilbert transform symbol -i sign(xi) on a one-dimensional grid.
template <typename Real>
Multiplier<Real> hilbert_multiplier(const Grid<Real>& grid) {
  if (grid.dim() != 1) throw ConfigError("the Hilbert transform lives on a one-dimensional grid");
  return Multiplier<Real>::from_symbol(grid, [](std::span<const Real> xi) {
    const Real s = xi[0] > 0 ? Real(1) : (xi[0] < 0 ? Real(-1) : Real(0));
    return std::complex<Real>(0, -s);
  });
}

template <typename Real>
VectorField<Real> riesz_apply(const ScalarField<Real>& f) {
  const auto m = riesz_multipliers(f.grid());
  return apply_multiplier(std::span<const Multiplier<Real>>(m), f);
}

/// Adjoint of riesz_apply: sum_k conj(m_k)(D) g_k.
template <typename Real>
ScalarField<Real> riesz_adjoint_apply(const VectorField<Real>& g) {
  if (g.size() != g.grid().dim()) throw ConfigError("g must have one component per dimension");
  const auto m = riesz_multipliers(g.grid());
  Spectrum<Real> acc(g.grid(), ComplexArray<Real>::Zero(g.grid().point_count()));
  for (int k = 0; k < g.size(); ++k)
    acc.coefficients() += forward_transform(g[k]).coefficients() * m[k].symbol().conjugate();
  return inverse_transform(acc);
}

template <typename Real = double>
struct NormOptions {
  Real tol = Real(1e-10);
  int max_iterations = 5000;
  std::uint64_t seed = 20140101;
};

/// T = M_{w^{1/2}} (m_1(D), ..., m_K(D)) M_{w^{-1/2}} restricted to mean-zero
/// inputs, for an arbitrary family of multipliers (the Riesz vector, a single
/// Hilbert transform, ...).
template <typename Real>
class WeightedMultiplierOperator {
 public:
  WeightedMultiplierOperator(const Grid<Real>& grid, const RealArray<Real>& weight,
                             std::vector<Multiplier<Real>> symbols)
      : grid_(grid), symbols_(std::move(symbols)) {
    detail::require_positive_weight(weight, grid.point_count());
    for (const auto& m : symbols_)
      if (!(m.grid() == grid)) throw ConfigError("multiplier and weight grids differ");
    sqrt_w_ = weight.sqrt();
    inv_sqrt_w_ = sqrt_w_.inverse();
  }

  const Grid<Real>& grid() const { return grid_; }
  int outputs() const { return static_cast<int>(symbols_.size()); }

  /// Components of T x (x is projected to mean zero first).
  std::vector<ComplexArray<Real>> apply(const ComplexArray<Real>& x) const {
    const ComplexArray<Real> y = (x - x.mean()) * inv_sqrt_w_.template cast<std::complex<Real>>();
    const Spectrum<Real> yhat = forward_transform(ScalarField<Real>(grid_, y));
    std::vector<ComplexArray<Real>> out;
    for (const auto& m : symbols_) {
      auto comp = inverse_transform(Spectrum<Real>(grid_, yhat.coefficients() * m.symbol()));
      out.push_back(comp.samples() * sqrt_w_.template cast<std::complex<Real>>());
    }
    return out;
  }

  /// Pi T* z, with Pi the mean-zero projection.
  ComplexArray<Real> adjoint(const std::vector<ComplexArray<Real>>& z) const {
    ComplexArray<Real> acc = ComplexArray<Real>::Zero(grid_.point_count());
    for (std::size_t k = 0; k < symbols_.size(); ++k) {
      const ComplexArray<Real> zk = z[k] * sqrt_w_.template cast<std::complex<Real>>();
      acc += forward_transform(ScalarField<Real>(grid_, zk)).coefficients() * symbols_[k].symbol().conjugate();
    }
    ComplexArray<Real> back = inverse_transform(Spectrum<Real>(grid_, acc)).samples();
    back *= inv_sqrt_w_.template cast<std::complex<Real>>();
    return back - back.mean();
  }

  ComplexArray<Real> gram(const ComplexArray<Real>& x) const { return adjoint(apply(x)); }

 private:
  Grid<Real> grid_;
  std::vector<Multiplier<Real>> symbols_;
  RealArray<Real> sqrt_w_;
  RealArray<Real> inv_sqrt_w_;
};

/// Fixed-seed complex Gaussian start vector with the mean removed.
template <typename Real>
ComplexArray<Real> random_mean_zero_start(std::size_t size, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  std::normal_distribution<Real> normal;
  ComplexArray<Real> x(size);
  for (std::size_t i = 0; i < size; ++i) x[i] = std::complex<Real>(normal(rng), normal(rng));
  return x - x.mean();
}

template <typename Real>
NormEstimate<Real> weighted_multiplier_norm(const WeightedMultiplierOperator<Real>& op,
                                            const NormOptions<Real>& options = {}) {
  return power_iteration<Real>([&](const ComplexArray<Real>& x) { return op.gram(x); },
                               random_mean_zero_start<Real>(op.grid().point_count(), options.seed),
                               options.tol, options.max_iterations);
}

/// ||R||_{L^2_w -> L^2_w} on mean-zero fields, by power iteration.
template <typename Real>
NormEstimate<Real> weighted_riesz_norm(const RealArray<Real>& weight, const Grid<Real>& grid,
                                       const NormOptions<Real>& options = {}) {
  const WeightedMultiplierOperator<Real> op(grid, weight, riesz_multipliers(grid));
  return weighted_multiplier_norm(op, options);
}

/// Largest singular value of T restricted to mean-zero inputs from a dense SVD
/// of its matrix. Only for grids with at most 4096 points.
template <typename Real>
NormEstimate<Real> dense_multiplier_norm(const WeightedMultiplierOperator<Real>& op) {
  const std::size_t size = op.grid().point_count();
  if (size > 4096) throw ConfigError("dense SVD oracle is limited to 4096 grid points");
  using Matrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index rows = static_cast<Eigen::Index>(size) * op.outputs();
  Matrix matrix(rows, static_cast<Eigen::Index>(size));
  ComplexArray<Real> e = ComplexArray<Real>::Zero(size);
  for (std::size_t j = 0; j < size; ++j) {
    e.setZero();
    e[j] = 1;
    const auto cols = op.apply(e);
    for (int k = 0; k < op.outputs(); ++k)
      matrix.col(j).segment(k * static_cast<Eigen::Index>(size), size) = cols[k].matrix();
  }
  Eigen::BDCSVD<Matrix> svd(matrix);
  NormEstimate<Real> out;
  out.method = "dense-svd";
  out.value = svd.singularValues()(0);
  out.converged = true;
  return out;
}

template <typename Real>
NormEstimate<Real> dense_weighted_riesz_norm(const RealArray<Real>& weight, const Grid<Real>& grid) {
  return dense_multiplier_norm(WeightedMultiplierOperator<Real>(grid, weight, riesz_multipliers(grid)));
}

}  // namespace rieszlab
