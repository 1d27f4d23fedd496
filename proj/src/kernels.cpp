#include "torusns/kernels.hpp"

#include <atomic>

namespace torusns::kernels {

namespace {
std::atomic<Execution> g_execution{Execution::parallel};
std::atomic<int> g_threads{0};
}  // namespace

Execution execution() { return g_execution.load(std::memory_order_relaxed); }

void set_execution(Execution mode) { g_execution.store(mode, std::memory_order_relaxed); }

int thread_count() {
  int n = g_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : omp_get_max_threads();
}

void set_thread_count(int n) { g_threads.store(n, std::memory_order_relaxed); }

}  // namespace torusns::kernels
