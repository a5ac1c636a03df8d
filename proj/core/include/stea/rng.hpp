#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace stea {

// Seedable 64-bit generator with portable derived draws.
//
// Wraps std::mt19937_64, whose output sequence is fixed by the standard.
// The standard distributions are implementation-defined, so integer and real
// draws are derived here directly from the raw 64-bit output:
//   uniform_index(n): rejection sampling on the top of the range (unbiased);
//   uniform01():      (x >> 11) * 2^-53, a double in [0, 1).
// Results are therefore identical across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Fisher-Yates from the back: for i = n-1..1 swap(v[i], v[uniform_index(i+1)]).
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      using std::swap;
      swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Stable 64-bit FNV-1a, used for config and dataset fingerprints.
std::uint64_t fnv1a64(std::span<const char> bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

// Independent stream seed for one consumer of a run-level seed, so that
// e.g. the partition shuffle and the model do not reuse one sequence.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose);

}  // namespace stea
