#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace fplab {

// Runs jobs 0 .. n_jobs-1 on up to n_workers threads. Each job must write
// only to state indexed by its own job id (e.g. a preallocated result slot)
// and draw randomness only from a stream keyed by the job id; the caller
// reduces the slots in job-id order afterwards. Under that discipline the
// final result is bit-identical for every worker count.
inline void parallel_for_jobs(std::size_t n_jobs, std::size_t n_workers,
                              const std::function<void(std::size_t)>& job) {
  if (n_jobs == 0) return;
  if (n_workers <= 1 || n_jobs == 1) {
    for (std::size_t i = 0; i < n_jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_jobs) return;
      job(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min(n_workers, n_jobs);
  pool.reserve(spawn);
  for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace fplab
