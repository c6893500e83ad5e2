// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace scid {

// Compensated (Kahan) accumulator. Works for double and std::complex<double>.
template <typename T>
class KahanSum {
 public:
  void add(const T& x) {
    const T y = x - carry_;
    const T t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  T value() const { return sum_; }

 private:
  T sum_{};
  T carry_{};
};

// Static block partition of [0, n). Each index must write only its own slots;
// the result is then independent of thread count and scheduling.
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads == 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = n * w / workers;
    const std::int64_t hi = n * (w + 1) / workers;
    pool.emplace_back([lo, hi, &body] {
      for (std::int64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace scid
