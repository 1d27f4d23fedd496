#pragma once

// Data-parallel loop kernels. Every kernel exists twice: a plain serial loop
// (the reference) and an OpenMP version. Callers go through the dispatching
// wrappers at the bottom, which pick one according to the process-wide
// execution mode. Both versions visit the same elements with the same
// per-element arithmetic, and reductions are max-only, so results are
// bit-identical between the two.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

#include <omp.h>

#include "torusns/grid.hpp"

namespace torusns::kernels {

enum class Execution { serial, parallel };

Execution execution();
void set_execution(Execution mode);

/// Thread count for parallel kernels and trial-level loops.
int thread_count();
void set_thread_count(int n);

class ScopedExecution {
 public:
  explicit ScopedExecution(Execution mode) : saved_(execution()) { set_execution(mode); }
  ~ScopedExecution() { set_execution(saved_); }
  ScopedExecution(const ScopedExecution&) = delete;
  ScopedExecution& operator=(const ScopedExecution&) = delete;

 private:
  Execution saved_;
};

namespace serial {

template <class Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

/// NaN entries count as +inf so that a max reduction cannot hide them.
inline double nan_as_inf(double v) { return v != v ? std::numeric_limits<double>::infinity() : v; }

template <class Fn>
double max_over(std::size_t n, Fn&& fn) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, nan_as_inf(fn(i)));
  return m;
}

/// fn(flat_index, k) over every lattice mode.
template <class Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
  const int M = g.modes();
  const auto& kt = g.axis_wavenumbers();
  if (g.dim() == 2) {
    for (int i0 = 0; i0 < M; ++i0) {
      for (int i1 = 0; i1 < M; ++i1) {
        fn(static_cast<std::size_t>(i0) * M + i1, Wavevector{kt[i0], kt[i1], 0});
      }
    }
    return;
  }
  for (int i0 = 0; i0 < M; ++i0) {
    for (int i1 = 0; i1 < M; ++i1) {
      std::size_t base = (static_cast<std::size_t>(i0) * M + i1) * M;
      for (int i2 = 0; i2 < M; ++i2) fn(base + i2, Wavevector{kt[i0], kt[i1], kt[i2]});
    }
  }
}

/// fn(half_index, full_index, k) over the modes kept by the r2c layout.
template <class Fn>
void for_each_half_mode(const TorusGrid& g, Fn&& fn) {
  const int M = g.modes();
  const int H = g.half_last();
  const auto& kt = g.axis_wavenumbers();
  if (g.dim() == 2) {
    for (int i0 = 0; i0 < M; ++i0) {
      for (int i1 = 0; i1 < H; ++i1) {
        fn(static_cast<std::size_t>(i0) * H + i1, static_cast<std::size_t>(i0) * M + i1,
           Wavevector{kt[i0], kt[i1], 0});
      }
    }
    return;
  }
  for (int i0 = 0; i0 < M; ++i0) {
    for (int i1 = 0; i1 < M; ++i1) {
      std::size_t hbase = (static_cast<std::size_t>(i0) * M + i1) * H;
      std::size_t fbase = (static_cast<std::size_t>(i0) * M + i1) * M;
      for (int i2 = 0; i2 < H; ++i2) fn(hbase + i2, fbase + i2, Wavevector{kt[i0], kt[i1], kt[i2]});
    }
  }
}

}  // namespace serial

namespace omp {

template <class Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (!omp_in_parallel())
  for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

template <class Fn>
double max_over(std::size_t n, Fn&& fn) {
  const long long count = static_cast<long long>(n);
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) num_threads(thread_count()) if (!omp_in_parallel())
  for (long long i = 0; i < count; ++i) m = std::max(m, serial::nan_as_inf(fn(static_cast<std::size_t>(i))));
  return m;
}

template <class Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
  const int M = g.modes();
  const auto& kt = g.axis_wavenumbers();
  if (g.dim() == 2) {
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (!omp_in_parallel())
    for (int i0 = 0; i0 < M; ++i0) {
      for (int i1 = 0; i1 < M; ++i1) {
        fn(static_cast<std::size_t>(i0) * M + i1, Wavevector{kt[i0], kt[i1], 0});
      }
    }
    return;
  }
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (!omp_in_parallel())
  for (int i0 = 0; i0 < M; ++i0) {
    for (int i1 = 0; i1 < M; ++i1) {
      std::size_t base = (static_cast<std::size_t>(i0) * M + i1) * M;
      for (int i2 = 0; i2 < M; ++i2) fn(base + i2, Wavevector{kt[i0], kt[i1], kt[i2]});
    }
  }
}

template <class Fn>
void for_each_half_mode(const TorusGrid& g, Fn&& fn) {
  const int M = g.modes();
  const int H = g.half_last();
  const auto& kt = g.axis_wavenumbers();
  if (g.dim() == 2) {
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (!omp_in_parallel())
    for (int i0 = 0; i0 < M; ++i0) {
      for (int i1 = 0; i1 < H; ++i1) {
        fn(static_cast<std::size_t>(i0) * H + i1, static_cast<std::size_t>(i0) * M + i1,
           Wavevector{kt[i0], kt[i1], 0});
      }
    }
    return;
  }
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (!omp_in_parallel())
  for (int i0 = 0; i0 < M; ++i0) {
    for (int i1 = 0; i1 < M; ++i1) {
      std::size_t hbase = (static_cast<std::size_t>(i0) * M + i1) * H;
      std::size_t fbase = (static_cast<std::size_t>(i0) * M + i1) * M;
      for (int i2 = 0; i2 < H; ++i2) fn(hbase + i2, fbase + i2, Wavevector{kt[i0], kt[i1], kt[i2]});
    }
  }
}

}  // namespace omp

template <class Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  if (execution() == Execution::parallel) {
    omp::for_each_index(n, fn);
  } else {
    serial::for_each_index(n, fn);
  }
}

template <class Fn>
double max_over(std::size_t n, Fn&& fn) {
  return execution() == Execution::parallel ? omp::max_over(n, fn) : serial::max_over(n, fn);
}

template <class Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
  if (execution() == Execution::parallel) {
    omp::for_each_mode(g, fn);
  } else {
    serial::for_each_mode(g, fn);
  }
}

template <class Fn>
void for_each_half_mode(const TorusGrid& g, Fn&& fn) {
  if (execution() == Execution::parallel) {
    omp::for_each_half_mode(g, fn);
  } else {
    serial::for_each_half_mode(g, fn);
  }
}

/// fn(i) for independent trials i = 0..n-1. Trials are scheduled dynamically;
/// kernels called inside run serially on their thread. Callers store results
/// by index, so the outcome does not depend on the schedule.
template <class Fn>
void for_each_trial(std::size_t n, Fn&& fn) {
  if (execution() == Execution::parallel) {
    // Exceptions may not leave an OpenMP region; the lowest failing index is rethrown.
    const long long count = static_cast<long long>(n);
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (long long i = 0; i < count; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    serial::for_each_index(n, fn);
  }
}

}  // namespace torusns::kernels
