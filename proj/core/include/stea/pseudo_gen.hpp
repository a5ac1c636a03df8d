#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stea/mapping.hpp"
#include "stea/normalizer.hpp"
#include "stea/sim_matrix.hpp"
#include "stea/types.hpp"

namespace stea {

enum class Strategy : std::uint8_t { UniThr, BiThr, MutHighestProb, SimThr, OneToOne, MutNearest };

std::string_view to_string(Strategy s) noexcept;
// Case-insensitive; throws ConfigError for unknown names.
Strategy parse_strategy(std::string_view name);

// True for strategies that consume q* (and so need the compatibility model).
bool uses_compatibility(Strategy s) noexcept;

struct StrategyConfig {
  Strategy strategy = Strategy::MutHighestProb;
  std::optional<double> alpha;  // UniThr, BiThr
  std::optional<double> theta;  // SimThr, OneToOne
  Direction uni_direction = Direction::SourceToTarget;

  // Throws ConfigError naming the missing or unexpected field.
  void validate() const;
};

// Entities excluded from pseudo generation (the labelled ones).
class LabelMask {
 public:
  LabelMask() = default;
  LabelMask(const MappingSet& labelled, std::size_t n_source, std::size_t n_target);

  bool source_excluded(EntityId e) const { return e < source_.size() && source_[e]; }
  bool target_excluded(EntityId e) const { return e < target_.size() && target_[e]; }
  // Row and column exclusion as seen from `direction`.
  bool row_excluded(Direction direction, EntityId e) const;
  bool col_excluded(Direction direction, EntityId e) const;

 private:
  std::vector<bool> source_;
  std::vector<bool> target_;
};

// Per row: keep (u, argmax) when its probability exceeds alpha. Rows of the
// TargetToSource direction are flipped into (source, target) order.
MappingSet uni_thr(std::span<const ProbRow> rows, double alpha, Direction direction);

// Union of uni_thr in both directions; conflicting pairs are all kept.
MappingSet bi_thr(std::span<const ProbRow> source_rows, std::span<const ProbRow> target_rows,
                  double alpha);

// Pairs that are each other's argmax in both directions.
MappingSet mut_highest_prob(std::span<const ProbRow> source_rows,
                            std::span<const ProbRow> target_rows);

// Masked row argmax (lowest id on ties); nullopt when every column is masked.
std::optional<Scored> masked_argmax(const SimMatrix& sim, std::size_t row, const LabelMask& mask);

// Baseline: per unmasked row, keep (u, argmax) when its similarity exceeds theta.
MappingSet sim_thr(const SimMatrix& sim, double theta, const LabelMask& mask = {});

// Baseline: greedy one-to-one matching over pairs with similarity above
// theta (descending score, ties by (source, target)), merged with
// `accumulated`. Conflicts keep the higher-scoring pair.
MappingSet one_to_one(const SimMatrix& sim, double theta, const MappingSet& accumulated,
                      const LabelMask& mask = {});

// Keeps the OneToOne pseudo set across iterations.
class OneToOneAccumulator {
 public:
  const MappingSet& update(const SimMatrix& sim, double theta, const LabelMask& mask = {});
  const MappingSet& current() const noexcept { return current_; }
  void reset() { current_ = MappingSet(MappingKind::Pseudo); }

 private:
  MappingSet current_{MappingKind::Pseudo};
};

// Baseline: mutual nearest neighbours under raw similarity. `forward` is
// SourceToTarget, `backward` TargetToSource.
MappingSet mut_nearest(const SimMatrix& forward, const SimMatrix& backward,
                       const LabelMask& mask = {});

}  // namespace stea
