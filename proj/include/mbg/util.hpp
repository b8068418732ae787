#pragma once
// Shared plumbing: error type, deterministic RNG streams, seed derivation,
// FNV hashing, environment knobs, and a fixed-worker thread pool.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mbg {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

// 64-bit FNV-1a over raw bytes. Used for config hashes and seed derivation.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ull);

// Independent stream seed from a base seed, a purpose label and an index.
std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                          std::uint64_t index = 0);

// mt19937_64 with pinned output transforms. The standard distributions are
// implementation-defined, so uniform/normal are spelled out here to keep
// every generated byte stable across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller; second value cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Worker count: min(hardware_concurrency, MBG_THREADS), at least 1.
int worker_count();

// Runs fn(first, last) over fixed-size blocks of [0, n). The block
// decomposition depends only on (n, block), never on the worker count, so
// any per-block accumulation reduced in block order is reproducible.
void parallel_blocks(std::size_t n, std::size_t block,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Convenience: parallel_blocks with results already disjoint per index range.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace mbg
