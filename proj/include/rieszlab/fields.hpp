#pragma once

// Periodic grids on the torus [-L/2, L/2)^n, complex scalar and vector fields
// sampled on them, and the discrete Fourier machinery every spectral operator
// in the library is built on.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "rieszlab/errors.hpp"

namespace rieszlab {

template <typename Real>
using ComplexArray = Eigen::Array<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealArray = Eigen::Array<Real, Eigen::Dynamic, 1>;

/// Uniform periodic grid with N points per axis over a period L in n dimensions.
/// Samples are stored row-major: the last axis varies fastest.
template <typename Real = double>
class Grid {
 public:
  static constexpr std::size_t kDefaultPointBudget = std::size_t{1} << 24;

  Grid(int dim, int points_per_axis, Real extent,
       std::size_t point_budget = kDefaultPointBudget)
      : dim_(dim), points_(points_per_axis), extent_(extent) {
    if (dim < 1) throw ConfigError("grid dimension must be positive");
    if (points_per_axis < 4 || points_per_axis % 2 != 0)
      throw ConfigError("points per axis must be even and at least 4");
    if (!(extent > 0) || !std::isfinite(static_cast<double>(extent)))
      throw ConfigError("grid extent must be positive and finite");
    std::size_t count = 1;
    for (int a = 0; a < dim; ++a) {
      if (count > point_budget / static_cast<std::size_t>(points_per_axis))
        throw ConfigError("grid point count exceeds the memory budget");
      count *= static_cast<std::size_t>(points_per_axis);
    }
    count_ = count;
  }

  int dim() const { return dim_; }
  int points_per_axis() const { return points_; }
  Real extent() const { return extent_; }
  Real spacing() const { return extent_ / points_; }
  std::size_t point_count() const { return count_; }
  Real cell_volume() const { return std::pow(spacing(), dim_); }

  /// Stride of axis `axis` in the flat sample layout.
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = dim_ - 1; a > axis; --a) s *= static_cast<std::size_t>(points_);
    return s;
  }

  /// Per-axis index of flat position `flat` along `axis`.
  int index(std::size_t flat, int axis) const {
    return static_cast<int>((flat / stride(axis)) % static_cast<std::size_t>(points_));
  }

  /// Signed integer frequency of per-axis index j, in (-N/2, N/2].
  int frequency(int j) const { return j <= points_ / 2 ? j : j - points_; }

  /// Angular frequency xi = 2 pi k / L for per-axis index j.
  Real angular_frequency(int j) const {
    return 2 * std::numbers::pi_v<Real> * frequency(j) / extent_;
  }

  /// Physical coordinate of per-axis index j.
  Real coordinate(int j) const { return -extent_ / 2 + j * spacing(); }

  /// Physical position of flat sample `flat`.
  std::vector<Real> position(std::size_t flat) const {
    std::vector<Real> x(dim_);
    for (int a = 0; a < dim_; ++a) x[a] = coordinate(index(flat, a));
    return x;
  }

  /// Euclidean norm of the angular frequency vector at flat position `flat`.
  Real frequency_norm(std::size_t flat) const {
    Real s = 0;
    for (int a = 0; a < dim_; ++a) {
      const Real xi = angular_frequency(index(flat, a));
      s += xi * xi;
    }
    return std::sqrt(s);
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.extent_ == b.extent_;
  }

 private:
  int dim_;
  int points_;
  Real extent_;
  std::size_t count_ = 0;
};

template <typename Real = double>
class ScalarField {
 public:
  explicit ScalarField(Grid<Real> grid)
      : grid_(std::move(grid)), samples_(ComplexArray<Real>::Zero(grid_.point_count())) {}

  ScalarField(Grid<Real> grid, ComplexArray<Real> samples)
      : grid_(std::move(grid)), samples_(std::move(samples)) {
    if (static_cast<std::size_t>(samples_.size()) != grid_.point_count())
      throw ConfigError("sample count does not match grid point count");
  }

  /// Samples f(x) at every grid position.
  template <typename F>
  static ScalarField from_function(const Grid<Real>& grid, F&& f) {
    ComplexArray<Real> s(grid.point_count());
    for (std::size_t i = 0; i < grid.point_count(); ++i) s[i] = f(grid.position(i));
    return ScalarField(grid, std::move(s));
  }

  const Grid<Real>& grid() const { return grid_; }
  const ComplexArray<Real>& samples() const { return samples_; }
  ComplexArray<Real>& samples() { return samples_; }

  ScalarField& operator+=(const ScalarField& o) {
    require_same_grid(o);
    samples_ += o.samples_;
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    require_same_grid(o);
    samples_ -= o.samples_;
    return *this;
  }
  ScalarField& operator*=(std::complex<Real> c) {
    samples_ *= c;
    return *this;
  }
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(std::complex<Real> c, ScalarField a) { return a *= c; }

  void require_same_grid(const ScalarField& o) const {
    if (!(grid_ == o.grid_)) throw ConfigError("fields live on different grids");
  }

 private:
  Grid<Real> grid_;
  ComplexArray<Real> samples_;
};

/// n-component field; all components share one grid.
template <typename Real = double>
class VectorField {
 public:
  explicit VectorField(std::vector<ScalarField<Real>> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("vector field needs at least one component");
    for (const auto& c : components_) components_.front().require_same_grid(c);
  }

  static VectorField zeros(const Grid<Real>& grid, int count) {
    return VectorField(std::vector<ScalarField<Real>>(count, ScalarField<Real>(grid)));
  }

  const Grid<Real>& grid() const { return components_.front().grid(); }
  int size() const { return static_cast<int>(components_.size()); }
  const ScalarField<Real>& operator[](int k) const { return components_[k]; }
  ScalarField<Real>& operator[](int k) { return components_[k]; }
  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }

  void require_same_shape(const VectorField& o) const {
    if (size() != o.size()) throw ConfigError("vector fields have different component counts");
    components_.front().require_same_grid(o.components_.front());
  }

  VectorField& operator+=(const VectorField& o) {
    require_same_shape(o);
    for (int k = 0; k < size(); ++k) components_[k] += o.components_[k];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    require_same_shape(o);
    for (int k = 0; k < size(); ++k) components_[k] -= o.components_[k];
    return *this;
  }
  VectorField& operator*=(std::complex<Real> c) {
    for (auto& comp : components_) comp *= c;
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(std::complex<Real> c, VectorField a) { return a *= c; }

 private:
  std::vector<ScalarField<Real>> components_;
};

/// Fourier-series coefficients of a field: entry at flat position i is the
/// coefficient of exp(i xi . (x + L/2)) for the frequency of that position, so
/// a constant c maps to c at k = 0.
template <typename Real = double>
class Spectrum {
 public:
  Spectrum(Grid<Real> grid, ComplexArray<Real> coefficients)
      : grid_(std::move(grid)), coefficients_(std::move(coefficients)) {}

  const Grid<Real>& grid() const { return grid_; }
  const ComplexArray<Real>& coefficients() const { return coefficients_; }
  ComplexArray<Real>& coefficients() { return coefficients_; }

 private:
  Grid<Real> grid_;
  ComplexArray<Real> coefficients_;
};

/// Fourier symbol materialized at every frequency of a grid.
template <typename Real = double>
class Multiplier {
 public:
  Multiplier(Grid<Real> grid, ComplexArray<Real> symbol)
      : grid_(std::move(grid)), symbol_(std::move(symbol)) {
    if (static_cast<std::size_t>(symbol_.size()) != grid_.point_count())
      throw ConfigError("symbol size does not match grid frequency count");
  }

  /// Builds a multiplier from a symbol m(xi) of the angular frequency vector.
  template <typename Symbol>
  static Multiplier from_symbol(const Grid<Real>& grid, Symbol&& symbol) {
    ComplexArray<Real> values(grid.point_count());
    std::vector<Real> xi(grid.dim());
    for (std::size_t i = 0; i < grid.point_count(); ++i) {
      for (int a = 0; a < grid.dim(); ++a) xi[a] = grid.angular_frequency(grid.index(i, a));
      values[i] = symbol(std::span<const Real>(xi));
    }
    return Multiplier(grid, std::move(values));
  }

  static Multiplier identity(const Grid<Real>& grid) {
    return Multiplier(grid, ComplexArray<Real>::Ones(grid.point_count()));
  }

  const Grid<Real>& grid() const { return grid_; }
  const ComplexArray<Real>& symbol() const { return symbol_; }

  Multiplier conjugate() const { return Multiplier(grid_, symbol_.conjugate()); }

 private:
  Grid<Real> grid_;
  ComplexArray<Real> symbol_;
};

namespace detail {

template <typename Real>
void transform_axes(const Grid<Real>& grid, ComplexArray<Real>& data, bool inverse) {
  Eigen::FFT<Real> fft;
  const int n = grid.points_per_axis();
  std::vector<std::complex<Real>> line(n), out(n);
  const std::size_t total = grid.point_count();
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const std::size_t stride = grid.stride(axis);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t outer = 0; outer < total; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (int j = 0; j < n; ++j) line[j] = data[base + j * stride];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (int j = 0; j < n; ++j) data[base + j * stride] = out[j];
      }
    }
  }
}

}  // namespace detail

/// Normalized forward DFT: coefficients of the trigonometric interpolant.
template <typename Real>
Spectrum<Real> forward_transform(const ScalarField<Real>& f) {
  ComplexArray<Real> data = f.samples();
  detail::transform_axes(f.grid(), data, false);
  data /= static_cast<Real>(f.grid().point_count());
  return Spectrum<Real>(f.grid(), std::move(data));
}

template <typename Real>
ScalarField<Real> inverse_transform(const Spectrum<Real>& s) {
  ComplexArray<Real> data = s.coefficients();
  detail::transform_axes(s.grid(), data, true);
  // Eigen's inverse divides by N per axis; undo to match the normalized forward.
  data *= static_cast<Real>(s.grid().point_count());
  return ScalarField<Real>(s.grid(), std::move(data));
}

template <typename Real>
ScalarField<Real> apply_multiplier(const Multiplier<Real>& m, const ScalarField<Real>& f) {
  if (!(m.grid() == f.grid())) throw ConfigError("multiplier and field grids differ");
  Spectrum<Real> s = forward_transform(f);
  s.coefficients() *= m.symbol();
  return inverse_transform(s);
}

/// Vector-valued multiplier acting on a scalar field; one output component per
/// symbol. The arity must equal the grid dimension.
template <typename Real>
VectorField<Real> apply_multiplier(std::span<const Multiplier<Real>> m,
                                   const ScalarField<Real>& f) {
  if (static_cast<int>(m.size()) != f.grid().dim())
    throw ConfigError("vector multiplier arity must equal the grid dimension");
  const Spectrum<Real> s = forward_transform(f);
  std::vector<ScalarField<Real>> out;
  out.reserve(m.size());
  for (const auto& mk : m) {
    if (!(mk.grid() == f.grid())) throw ConfigError("multiplier and field grids differ");
    out.push_back(inverse_transform(Spectrum<Real>(f.grid(), s.coefficients() * mk.symbol())));
  }
  return VectorField<Real>(std::move(out));
}

/// Same scalar symbol on every component.
template <typename Real>
VectorField<Real> apply_multiplier(const Multiplier<Real>& m, const VectorField<Real>& f) {
  std::vector<ScalarField<Real>> out;
  out.reserve(f.size());
  for (const auto& c : f) out.push_back(apply_multiplier(m, c));
  return VectorField<Real>(std::move(out));
}

/// Discrete L^2 pairing h^n sum f conj(g); linear in f.
template <typename Real>
std::complex<Real> inner_product(const ScalarField<Real>& f, const ScalarField<Real>& g) {
  f.require_same_grid(g);
  return (f.samples() * g.samples().conjugate()).sum() * f.grid().cell_volume();
}

template <typename Real>
std::complex<Real> inner_product(const VectorField<Real>& f, const VectorField<Real>& g) {
  f.require_same_shape(g);
  std::complex<Real> s = 0;
  for (int k = 0; k < f.size(); ++k) s += inner_product(f[k], g[k]);
  return s;
}

/// Frequency-side pairing L^n sum fhat conj(ghat); equals inner_product by Parseval.
template <typename Real>
std::complex<Real> spectral_inner_product(const Spectrum<Real>& f, const Spectrum<Real>& g) {
  if (!(f.grid() == g.grid())) throw ConfigError("spectra live on different grids");
  return (f.coefficients() * g.coefficients().conjugate()).sum() *
         std::pow(f.grid().extent(), f.grid().dim());
}

template <typename Real>
Real norm(const ScalarField<Real>& f) {
  return std::sqrt(f.samples().abs2().sum() * f.grid().cell_volume());
}

template <typename Real>
Real norm(const VectorField<Real>& f) {
  Real s = 0;
  for (const auto& c : f) s += c.samples().abs2().sum();
  return std::sqrt(s * f.grid().cell_volume());
}

namespace detail {

template <typename Real>
void require_positive_weight(const RealArray<Real>& w, std::size_t expected) {
  if (static_cast<std::size_t>(w.size()) != expected)
    throw ConfigError("weight sample count does not match grid");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w[i] > 0) || !std::isfinite(static_cast<double>(w[i])))
      throw ConfigError("weight must be strictly positive and finite at every sample");
}

}  // namespace detail

/// (h^n sum |f|^2 w)^{1/2} for a weight sampled on the field's grid.
template <typename Real>
Real weighted_norm(const ScalarField<Real>& f, const RealArray<Real>& w) {
  detail::require_positive_weight(w, f.grid().point_count());
  return std::sqrt((f.samples().abs2() * w).sum() * f.grid().cell_volume());
}

template <typename Real>
Real weighted_norm(const VectorField<Real>& f, const RealArray<Real>& w) {
  detail::require_positive_weight(w, f.grid().point_count());
  RealArray<Real> pointwise = RealArray<Real>::Zero(w.size());
  for (const auto& c : f) pointwise += c.samples().abs2();
  return std::sqrt((pointwise * w).sum() * f.grid().cell_volume());
}

/// Field minus its grid average.
template <typename Real>
ScalarField<Real> remove_mean(ScalarField<Real> f) {
  f.samples() -= f.samples().mean();
  return f;
}

}  // namespace rieszlab
