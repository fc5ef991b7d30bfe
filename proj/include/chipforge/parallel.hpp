#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace chipforge {

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Plain parallel loop over [0, n). The first exception wins and is rethrown
// on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const int nw = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)),
                                       std::max<std::size_t>(n, 1));
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto run = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        cursor.store(n, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(nw));
  for (int t = 0; t < nw; ++t) threads.emplace_back(run);
  for (auto& t : threads) t.join();
  if (err) std::rethrow_exception(err);
}

// Parallel producers, strictly ordered consumption: sink(i, value) is called
// for i = 0, 1, 2, ... under a lock, so output order is independent of the
// worker count and scheduling.
template <class T, class Produce, class Sink>
void ordered_parallel_produce(std::size_t n, int workers, Produce produce, Sink sink) {
  const int nw = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)),
                                       std::max<std::size_t>(n, 1));
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) sink(i, produce(i));
    return;
  }
  std::atomic<std::size_t> cursor{0};
  std::mutex mu;
  std::map<std::size_t, T> ready;
  std::size_t next = 0;
  std::exception_ptr err;

  auto run = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        T value = produce(i);
        std::lock_guard<std::mutex> lock(mu);
        if (err) return;
        ready.emplace(i, std::move(value));
        while (!ready.empty() && ready.begin()->first == next) {
          sink(next, std::move(ready.begin()->second));
          ready.erase(ready.begin());
          ++next;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
        cursor.store(n, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(nw));
  for (int t = 0; t < nw; ++t) threads.emplace_back(run);
  for (auto& t : threads) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace chipforge
