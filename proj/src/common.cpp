#include "fraclab/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace fraclab {

namespace {
std::atomic<int> g_threads{-1};

int initial_threads() {
  if (const char* env = std::getenv("FRACLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}
}  // namespace

void set_threads(int n) { g_threads = n < 0 ? 0 : n; }

int threads() {
  int n = g_threads.load();
  if (n < 0) {
    n = initial_threads();
    g_threads = n;
  }
  if (n == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    n = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  std::size_t workers = static_cast<std::size_t>(threads());
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  if (workers > count) workers = count;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void KahanSum::add(double x) {
  double t = sum + x;
  if (std::fabs(sum) >= std::fabs(x))
    c += (sum - t) + x;
  else
    c += (x - t) + sum;
  sum = t;
}

}  // namespace fraclab
