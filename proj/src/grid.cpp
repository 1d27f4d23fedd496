#include "torusns/grid.hpp"

#include <numbers>
#include <string>

namespace torusns {

TorusGrid TorusGrid::make(int dim, int modes_per_axis) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("TorusGrid: dim must be 2 or 3, got " + std::to_string(dim));
  }
  if (modes_per_axis < 8 || modes_per_axis % 2 != 0) {
    throw std::invalid_argument("TorusGrid: modes_per_axis must be even and >= 8, got " +
                                std::to_string(modes_per_axis));
  }
  return TorusGrid(dim, modes_per_axis);
}

TorusGrid::TorusGrid(int dim, int modes) : dim_(dim), modes_(modes) {
  size_ = 1;
  for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(modes_);
  half_size_ = size_ / static_cast<std::size_t>(modes_) * static_cast<std::size_t>(half_last());
  axis_k_.resize(modes_);
  for (int i = 0; i < modes_; ++i) axis_k_[i] = wavenumber(i);
}

double TorusGrid::point(int i) const {
  return 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(modes_);
}

std::array<int, kMaxDim> TorusGrid::unflatten(std::size_t idx) const {
  std::array<int, kMaxDim> a{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    a[d] = static_cast<int>(idx % static_cast<std::size_t>(modes_));
    idx /= static_cast<std::size_t>(modes_);
  }
  return a;
}

std::size_t TorusGrid::flatten(const std::array<int, kMaxDim>& axis_index) const {
  std::size_t idx = 0;
  for (int d = 0; d < dim_; ++d) idx = idx * static_cast<std::size_t>(modes_) + axis_index[d];
  return idx;
}

Wavevector TorusGrid::wavevector(std::size_t idx) const {
  auto a = unflatten(idx);
  Wavevector k{0, 0, 0};
  for (int d = 0; d < dim_; ++d) k[d] = wavenumber(a[d]);
  return k;
}

int TorusGrid::wavenumber_norm2(std::size_t idx) const {
  auto k = wavevector(idx);
  return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
}

std::size_t TorusGrid::conjugate_index(std::size_t idx) const {
  auto a = unflatten(idx);
  for (int d = 0; d < dim_; ++d) a[d] = (modes_ - a[d]) % modes_;
  return flatten(a);
}

std::size_t TorusGrid::index_of(const Wavevector& k) const {
  std::array<int, kMaxDim> a{0, 0, 0};
  for (int d = 0; d < dim_; ++d) {
    if (k[d] <= -modes_ / 2 || k[d] > modes_ / 2) return size_;
    a[d] = k[d] >= 0 ? k[d] : k[d] + modes_;
  }
  for (int d = dim_; d < kMaxDim; ++d) {
    if (k[d] != 0) return size_;
  }
  return flatten(a);
}

std::vector<MultiIndex> multi_indices(int dim, int order) {
  std::vector<MultiIndex> out;
  if (order < 0) return out;
  if (dim == 1) {
    out.push_back(MultiIndex::unit(0, order));
    return out;
  }
  for (int a0 = order; a0 >= 0; --a0) {
    if (dim == 2) {
      MultiIndex m;
      m.orders = {a0, order - a0, 0};
      out.push_back(m);
      continue;
    }
    for (int a1 = order - a0; a1 >= 0; --a1) {
      MultiIndex m;
      m.orders = {a0, a1, order - a0 - a1};
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace torusns
