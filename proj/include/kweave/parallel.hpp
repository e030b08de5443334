#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace kweave::detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Splits [0, count) into deterministically sized chunks, evaluates
/// fn(chunk_lo, chunk_hi) -> State concurrently, and returns the states in
/// chunk order. Chunk boundaries depend only on `count` and `min_chunk`,
/// never on the worker count, so any order-sensitive reduction done over the
/// returned vector is reproducible on every machine.
template <class State, class Fn>
std::vector<State> parallel_chunk_map(std::uint64_t count, unsigned threads,
                                      std::uint64_t min_chunk, Fn fn) {
  threads = resolve_threads(threads);
  if (min_chunk == 0) min_chunk = 1;
  std::uint64_t nchunks = (count + min_chunk - 1) / min_chunk;
  constexpr std::uint64_t kMaxChunks = 256;  // fixed, so boundaries ignore threads
  if (nchunks > kMaxChunks) nchunks = kMaxChunks;
  if (nchunks == 0) return {};
  const std::uint64_t chunk = (count + nchunks - 1) / nchunks;

  std::vector<State> states(nchunks);
  if (threads == 1 || nchunks == 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) {
      const std::uint64_t lo = c * chunk;
      const std::uint64_t hi = std::min(count, lo + chunk);
      states[c] = fn(lo, hi);
    }
    return states;
  }

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks || failed.load()) return;
      const std::uint64_t lo = c * chunk;
      const std::uint64_t hi = std::min(count, lo + chunk);
      try {
        states[c] = fn(lo, hi);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned nworkers = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, nchunks));
  pool.reserve(nworkers);
  for (unsigned t = 0; t < nworkers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(first_error);
  return states;
}

}  // namespace kweave::detail
