#include "torusns/fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "torusns/kernels.hpp"

namespace torusns {
namespace {

// One r2c/c2r plan pair per (dim, M). Plans are created with FFTW_UNALIGNED
// so they can be executed on any std::vector storage through the new-array
// interface, which FFTW documents as thread-safe.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  PlanPair(const TorusGrid& grid) {
    int n[kMaxDim];
    for (int d = 0; d < grid.dim(); ++d) n[d] = grid.modes();
    std::vector<double> real(grid.size());
    std::vector<Complex> half(grid.half_size());
    auto* cplx = reinterpret_cast<fftw_complex*>(half.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_r2c(grid.dim(), n, real.data(), cplx, flags);
    backward = fftw_plan_dft_c2r(grid.dim(), n, cplx, real.data(), flags | FFTW_DESTROY_INPUT);
  }
  ~PlanPair() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

const PlanPair& plans_for(const TorusGrid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<PlanPair>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{grid.dim(), grid.modes()}];
  if (!slot) slot = std::make_unique<PlanPair>(grid);
  return *slot;
}

// Line transforms for spectra supported in |k|_inf <= band. Axis transforms
// run last-axis-innermost: complex transforms over the leading axes touch only
// lines that can hold nonzero data, then a full set of 1D c2r transforms
// finishes the last axis. The last stage preserves its input, so entries past
// the band on the last axis stay zero between calls.
struct BandPlans {
  std::vector<std::pair<fftw_plan, std::size_t>> complex_stages;  // plan, offset into half
  fftw_plan last = nullptr;

  BandPlans(const TorusGrid& grid, int band) {
    const int M = grid.modes();
    const int H = grid.half_last();
    const int K = band;
    std::vector<Complex> half(grid.half_size());
    std::vector<double> real(grid.size());
    auto* c = reinterpret_cast<fftw_complex*>(half.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    auto add = [&](fftw_iodim dim, std::vector<fftw_iodim> many, std::size_t offset) {
      for (const auto& m : many) {
        if (m.n == 0) return;
      }
      fftw_plan p = fftw_plan_guru_dft(1, &dim, static_cast<int>(many.size()), many.data(), c, c, FFTW_BACKWARD, flags);
      complex_stages.emplace_back(p, offset);
    };
    if (grid.dim() == 2) {
      add({M, H, H}, {{K + 1, 1, 1}}, 0);
      fftw_iodim d{M, 1, 1};
      fftw_iodim many{M, H, M};
      last = fftw_plan_guru_dft_c2r(1, &d, 1, &many, c, real.data(), flags | FFTW_PRESERVE_INPUT);
    } else {
      const int row = M * H;
      add({M, row, row}, {{K + 1, H, H}, {K + 1, 1, 1}}, 0);
      add({M, row, row}, {{K, H, H}, {K + 1, 1, 1}}, static_cast<std::size_t>(M - K) * H);
      add({M, H, H}, {{M, row, row}, {K + 1, 1, 1}}, 0);
      fftw_iodim d{M, 1, 1};
      fftw_iodim many{M * M, H, M};
      last = fftw_plan_guru_dft_c2r(1, &d, 1, &many, c, real.data(), flags | FFTW_PRESERVE_INPUT);
    }
  }
  ~BandPlans() {
    for (auto& [p, off] : complex_stages) fftw_destroy_plan(p);
    fftw_destroy_plan(last);
  }
  BandPlans(const BandPlans&) = delete;
  BandPlans& operator=(const BandPlans&) = delete;
};

const BandPlans& band_plans_for(const TorusGrid& grid, int band) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<BandPlans>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{grid.dim(), grid.modes(), band}];
  if (!slot) slot = std::make_unique<BandPlans>(grid, band);
  return *slot;
}

}  // namespace

namespace fft {

void c2r_banded(const TorusGrid& grid, std::span<Complex> half_in, std::span<double> out, int band) {
  if (band < 0 || 2 * band + 1 >= grid.modes()) {
    c2r(grid, half_in, out);
    return;
  }
  const auto& p = band_plans_for(grid, band);
  auto* c = reinterpret_cast<fftw_complex*>(half_in.data());
  for (const auto& [plan, offset] : p.complex_stages) fftw_execute_dft(plan, c + offset, c + offset);
  fftw_execute_dft_c2r(p.last, c, out.data());
}

void r2c(const TorusGrid& grid, std::span<const double> in, std::span<Complex> half_out) {
  const auto& p = plans_for(grid);
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(half_out.data()));
  const double scale = 1.0 / static_cast<double>(grid.size());
  kernels::for_each_index(half_out.size(), [&](std::size_t i) { half_out[i] *= scale; });
}

void c2r(const TorusGrid& grid, std::span<Complex> half_in, std::span<double> out) {
  const auto& p = plans_for(grid);
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(half_in.data()), out.data());
}

void half_to_full(const TorusGrid& grid, std::span<const Complex> half, std::span<Complex> full) {
  const int M = grid.modes();
  const int H = grid.half_last();
  const std::size_t rows = grid.size() / static_cast<std::size_t>(M);
  kernels::for_each_index(rows, [&](std::size_t row) {
    // Row index encodes every axis but the last; its conjugate row negates them.
    std::size_t conj_row = 0;
    if (grid.dim() == 2) {
      conj_row = (M - row) % M;
    } else {
      std::size_t i0 = row / M;
      std::size_t i1 = row % M;
      conj_row = ((M - i0) % M) * M + (M - i1) % M;
    }
    const Complex* src = half.data() + row * H;
    const Complex* csrc = half.data() + conj_row * H;
    Complex* dst = full.data() + row * M;
    for (int i = 0; i < H; ++i) dst[i] = src[i];
    for (int i = H; i < M; ++i) dst[i] = std::conj(csrc[M - i]);
  });
}

void full_to_half(const TorusGrid& grid, std::span<const Complex> full, std::span<Complex> half) {
  const int M = grid.modes();
  const int H = grid.half_last();
  const std::size_t rows = grid.size() / static_cast<std::size_t>(M);
  kernels::for_each_index(rows, [&](std::size_t row) {
    const Complex* src = full.data() + row * M;
    Complex* dst = half.data() + row * H;
    for (int i = 0; i < H; ++i) dst[i] = src[i];
  });
}

}  // namespace fft

SpectralField forward_transform(const RealField& f) {
  const auto& g = f.grid();
  std::vector<Complex> half(g.half_size());
  fft::r2c(g, f.values(), half);
  SpectralField out(g);
  fft::half_to_full(g, half, out.coeffs());
  return out;
}

RealField inverse_transform(const SpectralField& f) {
  const auto& g = f.grid();
  std::vector<Complex> half(g.half_size());
  fft::full_to_half(g, f.coeffs(), half);
  RealField out(g);
  fft::c2r(g, half, out.values());
  return out;
}

SpectralVector forward_transform(const RealVector& f) {
  std::vector<SpectralField> comps;
  comps.reserve(static_cast<std::size_t>(f.size()));
  for (const auto& c : f) comps.push_back(forward_transform(c));
  return SpectralVector(std::move(comps));
}

RealVector inverse_transform(const SpectralVector& f) {
  std::vector<RealField> comps;
  comps.reserve(static_cast<std::size_t>(f.size()));
  for (const auto& c : f) comps.push_back(inverse_transform(c));
  return RealVector(std::move(comps));
}

}  // namespace torusns
