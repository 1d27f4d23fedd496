#include "torusns/field.hpp"

#include <algorithm>
#include <cmath>

namespace torusns {

Complex& SpectralField::at(const Wavevector& k) {
  auto idx = grid_.index_of(k);
  if (idx >= coeffs_.size()) throw std::out_of_range("SpectralField::at: wavevector outside lattice");
  return coeffs_[idx];
}

const Complex& SpectralField::at(const Wavevector& k) const {
  auto idx = grid_.index_of(k);
  if (idx >= coeffs_.size()) throw std::out_of_range("SpectralField::at: wavevector outside lattice");
  return coeffs_[idx];
}

double SpectralField::conjugate_symmetry_defect() const {
  double worst = 0.0;
  for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
    auto partner = grid_.conjugate_index(idx);
    worst = std::max(worst, std::abs(coeffs_[partner] - std::conj(coeffs_[idx])));
  }
  return worst;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.grid_ != grid_) throw std::invalid_argument("SpectralField: grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (o.grid_ != grid_) throw std::invalid_argument("SpectralField: grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
  if (o.grid_ != grid_) throw std::invalid_argument("SpectralField: grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
}

double conjugate_symmetry_defect(const SpectralVector& v) {
  double worst = 0.0;
  for (const auto& c : v) worst = std::max(worst, c.conjugate_symmetry_defect());
  return worst;
}

}  // namespace torusns
