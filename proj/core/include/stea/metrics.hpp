#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stea/mapping.hpp"
#include "stea/sim_matrix.hpp"
#include "stea/types.hpp"

namespace stea {

struct EvalReport {
  double hit1 = 0.0;
  double hit10 = 0.0;
  double mrr = 0.0;
  std::size_t n = 0;
};

// 1-based rank of `truth` in `scores`: columns with a higher score, or an
// equal score and a lower id, come first.
std::size_t rank_of(std::span<const double> scores, EntityId truth);

// Ranking metrics over rows with one truth each. Throws
// std::invalid_argument when a truth is missing or out of range, or k = 0.
double hit_at_k(std::span<const std::vector<double>> rows, std::span<const EntityId> truths,
                std::size_t k);
double mrr(std::span<const std::vector<double>> rows, std::span<const EntityId> truths);
EvalReport evaluate(std::span<const std::vector<double>> rows, std::span<const EntityId> truths);

// Ranks every test pair of `test` (in (source, target) order) among the
// test counterparts only: rows are test sources of the direction, columns
// the test entities of the other side.
EvalReport evaluate_alignment(const SimMatrix& sim, const MappingSet& test, unsigned threads = 1);

struct PseudoQuality {
  double precision = 1.0;
  double recall = 0.0;
  std::size_t correct = 0;
  std::size_t count = 0;
  bool empty = true;  // precision is the 1.0 convention
};

PseudoQuality pseudo_quality(const MappingSet& pseudo, const MappingSet& truth);

}  // namespace stea
