#pragma once

// Minimal fork-join helper.  Modules take a const WorkerPool& and stay
// agnostic of how the chunks run; results reduce deterministically
// (lowest index wins ties) so reports do not depend on the job count.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

namespace dul {

class WorkerPool {
 public:
  explicit WorkerPool(unsigned jobs = 1) : jobs_(jobs == 0 ? 1 : jobs) {}

  unsigned jobs() const { return jobs_; }

  // Evaluates fn(i) for i in [0, n) and returns the maximizing (value, index),
  // with the smallest index on ties.
  struct MaxResult {
    double value;
    std::size_t index;
  };

  MaxResult parallel_max(std::size_t n, const std::function<double(std::size_t)>& fn) const {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), 0};
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs_, n));
    std::vector<MaxResult> partial(workers, {-std::numeric_limits<double>::infinity(), 0});
    auto run_chunk = [&](unsigned w) {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      MaxResult best{-std::numeric_limits<double>::infinity(), lo};
      for (std::size_t i = lo; i < hi; ++i) {
        const double v = fn(i);
        if (v > best.value) best = {v, i};
      }
      partial[w] = best;
    };
    if (workers == 1) {
      run_chunk(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
      for (auto& th : pool) th.join();
    }
    MaxResult best = partial[0];
    for (unsigned w = 1; w < workers; ++w)
      if (partial[w].value > best.value) best = partial[w];
    return best;
  }

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) const {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs_, n));
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      });
    }
    for (auto& th : pool) th.join();
  }

 private:
  unsigned jobs_;
};

}  // namespace dul
