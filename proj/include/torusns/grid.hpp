#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace torusns {

/// Maximum spatial dimension supported by the field machinery.
inline constexpr int kMaxDim = 3;

/// Wavenumber vector; entries past `dim` are zero.
using Wavevector = std::array<int, kMaxDim>;

/// Uniform collocation grid on the torus [0, 2pi)^n.
///
/// Storage is row-major over axes (axis 0 slowest). Along each axis the
/// index i in [0, M) carries wavenumber i for i <= M/2 and i - M otherwise,
/// so the retained lattice is {-M/2+1, ..., M/2}^n with the single Nyquist
/// index M/2 per axis.
class TorusGrid {
 public:
  TorusGrid() = default;

  /// Throws std::invalid_argument unless dim is 2 or 3 and modes is even and >= 8.
  static TorusGrid make(int dim, int modes_per_axis);

  int dim() const { return dim_; }
  int modes() const { return modes_; }
  std::size_t size() const { return size_; }

  /// Number of coefficients in the half-spectrum layout used by the r2c transform.
  std::size_t half_size() const { return half_size_; }
  int half_last() const { return modes_ / 2 + 1; }

  double point(int i) const;
  int wavenumber(int i) const { return i <= modes_ / 2 ? i : i - modes_; }
  int nyquist() const { return modes_ / 2; }

  /// Per-axis indices of a flat storage index.
  std::array<int, kMaxDim> unflatten(std::size_t idx) const;
  std::size_t flatten(const std::array<int, kMaxDim>& axis_index) const;

  Wavevector wavevector(std::size_t idx) const;
  int wavenumber_norm2(std::size_t idx) const;

  /// Storage index of -k (mod M on every axis).
  std::size_t conjugate_index(std::size_t idx) const;

  /// Storage index of wavevector k, or size() when k is outside the lattice.
  std::size_t index_of(const Wavevector& k) const;

  /// Largest |k|^2 over the lattice.
  int max_wavenumber_norm2() const { return dim_ * (modes_ / 2) * (modes_ / 2); }

  /// Largest per-axis |k| kept by the two-thirds rule.
  int dealias_cutoff() const { return modes_ / 3; }

  /// Per-axis wavenumber table, shared by every axis.
  const std::vector<int>& axis_wavenumbers() const { return axis_k_; }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
    return a.dim_ == b.dim_ && a.modes_ == b.modes_;
  }
  friend bool operator!=(const TorusGrid& a, const TorusGrid& b) { return !(a == b); }

 private:
  TorusGrid(int dim, int modes);

  int dim_ = 0;
  int modes_ = 0;
  std::size_t size_ = 0;
  std::size_t half_size_ = 0;
  std::vector<int> axis_k_;
};

/// Derivative orders per axis, D^alpha = D_1^{a_1} ... D_n^{a_n}.
struct MultiIndex {
  std::array<int, kMaxDim> orders{0, 0, 0};

  int order() const { return orders[0] + orders[1] + orders[2]; }
  int operator[](int axis) const { return orders[axis]; }

  static MultiIndex unit(int axis, int power = 1) {
    MultiIndex a;
    a.orders[axis] = power;
    return a;
  }

  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) {
    for (int d = 0; d < kMaxDim; ++d) a.orders[d] += b.orders[d];
    return a;
  }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// All multiindices in `dim` variables with |alpha| = order, lexicographic.
std::vector<MultiIndex> multi_indices(int dim, int order);

}  // namespace torusns
