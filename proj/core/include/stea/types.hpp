#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace stea {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

inline constexpr EntityId kNoEntity = std::numeric_limits<EntityId>::max();

// Which KG plays the source role of a similarity matrix or probability row.
enum class Direction : std::uint8_t { SourceToTarget = 0, TargetToSource = 1 };

constexpr Direction reverse(Direction d) noexcept {
  return d == Direction::SourceToTarget ? Direction::TargetToSource
                                        : Direction::SourceToTarget;
}

const char* to_string(Direction d) noexcept;
Direction parse_direction(const std::string& text);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : std::runtime_error(where + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stea
