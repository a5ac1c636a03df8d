#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "stea/kg.hpp"
#include "stea/mapping.hpp"
#include "stea/normalizer.hpp"

namespace stea {

// Relations are used in both orientations: the forward relation r(x, y) and
// its inverse r^-(y, x). A DirRel packs (relation, orientation).
using DirRel = std::uint32_t;
constexpr DirRel forward_rel(RelationId r) noexcept { return 2 * r; }
constexpr DirRel inverse_rel(RelationId r) noexcept { return 2 * r + 1; }

enum class Side : std::uint8_t { Source = 0, Target = 1 };
constexpr Side other(Side s) noexcept { return s == Side::Source ? Side::Target : Side::Source; }

// Relation statistics used by the compatibility factor.
//
// inv_fun(side, r): inverse functionality of a directed relation.
// subrel(side, a, b): probability that relation a of `side` is a
//   sub-relation of relation b of the other side. Pairs without an explicit
//   entry read the per-relation default (zero unless set).
class RelationStats {
 public:
  RelationStats() = default;
  RelationStats(std::size_t source_relations, std::size_t target_relations);

  double inv_fun(Side side, DirRel r) const;
  void set_inv_fun(Side side, DirRel r, double value);

  double subrel(Side left_side, DirRel left, DirRel right) const;
  void set_subrel(Side left_side, DirRel left, DirRel right, double value);
  void set_subrel_default(Side left_side, DirRel left, double value);

  std::size_t num_dir_relations(Side side) const noexcept {
    return inv_fun_[static_cast<int>(side)].size();
  }

  // Statistics for the pair with source and target exchanged.
  RelationStats swapped() const;

 private:
  static std::uint64_t key(DirRel a, DirRel b) noexcept {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::vector<double> inv_fun_[2];
  std::vector<double> subrel_default_[2];
  std::unordered_map<std::uint64_t, double> subrel_[2];
};

// Current counterpart of each source entity. Labelled entries hold the
// ground truth; the rest hold the model's current argmax.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t num_entities)
      : value_(num_entities, kNoEntity), labelled_(num_entities, false) {}

  std::size_t size() const noexcept { return value_.size(); }
  EntityId at(EntityId e) const { return value_.at(e); }
  bool assigned(EntityId e) const { return value_.at(e) != kNoEntity; }
  bool labelled(EntityId e) const { return labelled_.at(e); }

  // Throws std::logic_error when overwriting a labelled entry.
  void assign(EntityId e, EntityId counterpart, bool labelled = false);
  void clear(EntityId e);

  // Labelled entries from `labelled` (pairs in (source, target) order).
  static Assignment from_labelled(std::size_t num_entities, const MappingSet& labelled);

  // Inverse relation target -> sources.
  std::vector<std::vector<EntityId>> inverse(std::size_t num_targets) const;

 private:
  std::vector<EntityId> value_;
  std::vector<bool> labelled_;
};

// Labelled entries plus the argmax of each q row for unlabelled entities.
Assignment make_assignment(std::size_t num_entities, const MappingSet& labelled,
                           std::span<const ProbRow> q_rows);

// PARIS-style statistics from the current assignment.
//
// inv_fun(r) = distinct tails / triples; inv_fun(r^-) = distinct heads /
// triples. For a directed relation a on one side, trials(a) counts its
// triples whose two endpoints both have counterparts, support(a, b) those
// whose counterparts are joined by b on the other side (orientation
// matched). subrel(a, b) = (support + 1) / (trials + 2); a relation with no
// trials reads 1/2.
RelationStats estimate_relation_stats(const KgPair& pair, const Assignment& assignment);

// Local compatibility g at source entity e when y_e = candidate:
//
//   g = 1 - prod over aligned triple pairs r(e, n) in G, r'(candidate, n')
//           in G' (same orientation, incoming triples as inverse relations)
//       of (1 - Pr(r' sub r) inv_fun(r) [y_n = n'])
//        * (1 - Pr(r sub r') inv_fun(r') [y_n = n'])
//
// Neighbours without an assignment contribute indicator 0.
double local_compatibility(const KgPair& pair, const RelationStats& stats,
                           const Assignment& assignment, EntityId e, EntityId candidate);

// p(y_u = c | y_MB(u)) over `candidates`: softmax of S(c), the sum of the
// local compatibilities of every factor subset containing u with y_u = c.
// Factors anchored at unassigned neighbours are skipped.
struct ConditionalRow {
  EntityId source = kNoEntity;
  std::vector<EntityId> candidates;
  std::vector<double> factor_sums;  // S(c)
  std::vector<double> probs;

  ProbRow to_prob_row() const;
};

ConditionalRow conditional_distribution(const KgPair& pair, const RelationStats& stats,
                                        const Assignment& assignment, EntityId u,
                                        std::span<const EntityId> candidates);

struct QStarOptions {
  std::size_t top_k = 10;
  // Block coordinate-ascent updates. After each sweep the assignment of the
  // unlabelled entities is reset to the argmax of the new rows.
  std::size_t sweeps = 1;
  unsigned threads = 1;
};

// Dependency-aware rows q*. The assignment is the labelled truths plus the
// argmax of every q row; each row entity then gets the conditional
// distribution over its top-K candidates by q (ordered by descending q,
// ties by id), all computed against the same frozen assignment.
std::vector<ConditionalRow> derive_q_star(const KgPair& pair, const RelationStats& stats,
                                          const MappingSet& labelled,
                                          std::span<const ProbRow> q_rows,
                                          const QStarOptions& options = {});

// Exact p(y_L, y_U) of the product-of-exp(g) model by enumeration, for tiny
// instances. `fixed` holds the labelled assignment; free entity i ranges over
// grids[i]. Factors anchored at entities that are neither fixed nor free are
// left out. Evaluates g by scanning all triples, independent of the indexed
// path above.
class JointTable {
 public:
  const std::vector<EntityId>& free_entities() const noexcept { return free_; }
  const std::vector<std::vector<EntityId>>& grids() const noexcept { return grids_; }
  std::span<const double> probs() const noexcept { return probs_; }

  // Probability of one configuration, given as grid indices.
  double prob(std::span<const std::size_t> index) const;

  // Conditional of free entity `which` with the others held at `index`
  // (the entry for `which` is ignored).
  std::vector<double> conditional(std::size_t which, std::span<const std::size_t> index) const;

 private:
  friend JointTable joint_bruteforce(const KgPair&, const RelationStats&, const Assignment&,
                                     std::span<const EntityId>,
                                     std::span<const std::vector<EntityId>>, std::size_t);
  std::size_t flat(std::span<const std::size_t> index) const;

  std::vector<EntityId> free_;
  std::vector<std::vector<EntityId>> grids_;
  std::vector<double> probs_;
};

JointTable joint_bruteforce(const KgPair& pair, const RelationStats& stats,
                            const Assignment& fixed, std::span<const EntityId> free_entities,
                            std::span<const std::vector<EntityId>> grids,
                            std::size_t max_states = 100000);

// Rows "source<TAB>candidate<TAB>S(c)<TAB>q*(c)" with KG labels.
void write_q_star_debug(std::ostream& out, const KgPair& pair,
                        std::span<const ConditionalRow> rows);

}  // namespace stea
