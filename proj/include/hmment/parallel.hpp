#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hmment {

/// Worker count from HMMENT_THREADS, else the hardware concurrency.
int default_worker_count();

/**
 * Runs body(i) for every i in [0, count) on up to `workers` threads. Each
 * index writes only its own result slot, so callers reduce the slots in index
 * order afterwards and results do not depend on the worker count.
 */
template <class Body>
void for_each_chunk(std::size_t count, int workers, Body&& body) {
  if (workers <= 0) workers = default_worker_count();
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace hmment
