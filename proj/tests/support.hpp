#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

#include "torusns/fft.hpp"
#include "torusns/field.hpp"
#include "torusns/spectral.hpp"

namespace testing {

inline torusns::SpectralVector sampled(const torusns::TorusGrid& g,
                                       std::vector<std::function<double(std::array<double, 3>)>> comps) {
  std::vector<torusns::RealField> fields;
  for (auto& fn : comps) fields.push_back(torusns::RealField::sample(g, fn));
  while (static_cast<int>(fields.size()) < g.dim()) fields.emplace_back(g);
  return torusns::forward_transform(torusns::RealVector(std::move(fields)));
}

inline torusns::SpectralField sampled_scalar(const torusns::TorusGrid& g, std::function<double(std::array<double, 3>)> fn) {
  return torusns::forward_transform(torusns::RealField::sample(g, fn));
}

inline double diff(const torusns::SpectralVector& a, const torusns::SpectralVector& b) {
  return torusns::sup_norm(a - b);
}

inline double diff(const torusns::SpectralField& a, const torusns::SpectralField& b) {
  return torusns::sup_norm(a - b);
}

inline double coeff_diff(const torusns::SpectralVector& a, const torusns::SpectralVector& b) {
  double m = 0.0;
  for (int c = 0; c < a.size(); ++c) {
    for (std::size_t i = 0; i < a[c].size(); ++i) m = std::max(m, std::abs(a[c][i] - b[c][i]));
  }
  return m;
}

}  // namespace testing
