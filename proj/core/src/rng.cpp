#include "stea/rng.hpp"

#include <stdexcept>

#include "stea/types.hpp"

namespace stea {

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Largest multiple of `bound` representable; draws above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t fnv1a64(std::span<const char> bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char* to_string(Direction d) noexcept {
  return d == Direction::SourceToTarget ? "source->target" : "target->source";
}

Direction parse_direction(const std::string& text) {
  if (text == "source->target" || text == "source") return Direction::SourceToTarget;
  if (text == "target->source" || text == "target") return Direction::TargetToSource;
  throw ConfigError("unknown direction '" + text + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((seed >> (8 * i)) & 0xff);
  // splitmix64 finalizer over FNV-1a(seed bytes, purpose).
  std::uint64_t z = fnv1a64(std::span<const char>(purpose.data(), purpose.size()),
                            fnv1a64(bytes));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace stea
