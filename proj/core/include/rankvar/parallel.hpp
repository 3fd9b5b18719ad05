#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rankvar {

// Worker count: RANKVAR_WORKERS if set to a positive integer, otherwise all cores.
unsigned default_workers();

// Runs body(begin, end, worker) over [0, count) in chunks on up to `workers` threads.
// Chunk assignment is dynamic, so callers must combine results order-independently.
// The first exception thrown by any chunk is rethrown on the calling thread.
template <class Body>
void parallel_chunks(std::size_t count, unsigned workers, Body&& body, std::size_t chunk = 64) {
  if (count == 0) return;
  workers = std::max(1u, workers);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
  if (threads == 1) {
    body(std::size_t{0}, count, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](unsigned worker) {
    try {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) break;
        body(c * chunk, std::min(count, (c + 1) * chunk), worker);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(chunks);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rankvar
