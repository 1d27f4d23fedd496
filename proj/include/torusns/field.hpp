#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "torusns/grid.hpp"

namespace torusns {

using Complex = std::complex<double>;

/// Real scalar sampled on the collocation points of a grid.
class RealField {
 public:
  RealField() = default;
  explicit RealField(TorusGrid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
  RealField(TorusGrid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw std::invalid_argument("RealField: value count != M^n");
  }

  /// Samples fn(x) with x an std::array<double, 3> of coordinates (unused axes 0).
  template <class Fn>
  static RealField sample(const TorusGrid& grid, Fn&& fn) {
    RealField f(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      auto a = grid.unflatten(idx);
      std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
      for (int d = 0; d < grid.dim(); ++d) x[d] = grid.point(a[d]);
      f.values_[idx] = fn(x);
    }
    return f;
  }

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients over the full retained lattice, stored in grid order.
/// The stored value at k is the coefficient of exp(i k.x).
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(TorusGrid grid) : grid_(std::move(grid)), coeffs_(grid_.size()) {}
  SpectralField(TorusGrid grid, std::vector<Complex> coeffs)
      : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) throw std::invalid_argument("SpectralField: coefficient count != M^n");
  }

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Coefficient at wavevector k; throws std::out_of_range outside the lattice.
  Complex& at(const Wavevector& k);
  const Complex& at(const Wavevector& k) const;

  /// max_k |c(-k) - conj(c(k))|; zero for fields representing real functions.
  /// Nyquist-aliased partners are compared with their own conjugate.
  double conjugate_symmetry_defect() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  SpectralField& operator*=(Complex s);

  /// this += s * o
  void axpy(double s, const SpectralField& o);

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(double s, SpectralField a) { return a *= s; }

/// n components on one grid.
template <class Field>
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<Field> components) : comps_(std::move(components)) {
    if (comps_.empty()) throw std::invalid_argument("VectorField: no components");
    for (const auto& c : comps_) {
      if (c.grid() != comps_.front().grid()) throw std::invalid_argument("VectorField: component grids differ");
    }
  }

  static VectorField zeros(const TorusGrid& grid) {
    return VectorField(std::vector<Field>(static_cast<std::size_t>(grid.dim()), Field(grid)));
  }

  const TorusGrid& grid() const { return comps_.front().grid(); }
  int size() const { return static_cast<int>(comps_.size()); }
  Field& operator[](int i) { return comps_[static_cast<std::size_t>(i)]; }
  const Field& operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }
  auto begin() { return comps_.begin(); }
  auto end() { return comps_.end(); }
  auto begin() const { return comps_.begin(); }
  auto end() const { return comps_.end(); }

  VectorField& operator+=(const VectorField& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  VectorField& operator*=(double s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  void axpy(double s, const VectorField& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i].axpy(s, o.comps_[i]);
  }

 private:
  void check_same_shape(const VectorField& o) const {
    if (o.comps_.size() != comps_.size() || o.grid() != grid()) {
      throw std::invalid_argument("VectorField: shape mismatch");
    }
  }

  std::vector<Field> comps_;
};

using SpectralVector = VectorField<SpectralField>;

/// Physical-space vector field; arithmetic is not needed on this side.
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::vector<RealField> components) : comps_(std::move(components)) {
    if (comps_.empty()) throw std::invalid_argument("RealVector: no components");
    for (const auto& c : comps_) {
      if (c.grid() != comps_.front().grid()) throw std::invalid_argument("RealVector: component grids differ");
    }
  }
  const TorusGrid& grid() const { return comps_.front().grid(); }
  int size() const { return static_cast<int>(comps_.size()); }
  RealField& operator[](int i) { return comps_[static_cast<std::size_t>(i)]; }
  const RealField& operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }
  auto begin() const { return comps_.begin(); }
  auto end() const { return comps_.end(); }

 private:
  std::vector<RealField> comps_;
};

inline SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
inline SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
inline SpectralVector operator*(double s, SpectralVector a) { return a *= s; }

/// Largest conjugate-symmetry defect over the components.
double conjugate_symmetry_defect(const SpectralVector& v);

}  // namespace torusns
