#include "wkam/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wkam {

namespace {

std::atomic<int> g_max_threads{0};
thread_local bool t_inside_task = false;

}  // namespace

void set_max_threads(int n) { g_max_threads.store(std::max(0, n)); }

int max_threads() {
  const int n = g_max_threads.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t grain, const std::function<void(std::size_t, std::size_t)>& body) {
  const int threads = t_inside_task ? 1 : max_threads();
  if (threads <= 1 || n < grain) {
    body(0, n);
    return;
  }
#ifdef _OPENMP
  const std::size_t chunks = static_cast<std::size_t>(threads) * 4;
  const std::size_t step = (n + chunks - 1) / chunks;
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * step;
    const std::size_t end = std::min(n, begin + step);
    if (begin < end) body(begin, end);
  }
#else
  body(0, n);
#endif
}

void run_tasks(const std::vector<std::function<void()>>& tasks) {
  std::vector<std::exception_ptr> errors(tasks.size());
  const std::size_t workers = std::min<std::size_t>(tasks.size(), static_cast<std::size_t>(t_inside_task ? 1 : max_threads()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        t_inside_task = true;
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          try {
            tasks[i]();
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wkam
