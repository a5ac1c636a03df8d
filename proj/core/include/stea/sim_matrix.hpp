#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stea/types.hpp"

namespace stea {

struct Scored {
  EntityId id;
  double score;
};

// Similarities between every row entity (of the direction's source KG) and
// every column entity. Stored densely, or as per-row top-K lists sorted by
// descending score (ties by ascending id) with one fill value for the tail.
class SimMatrix {
 public:
  SimMatrix() = default;

  static SimMatrix dense(Direction direction, std::size_t rows, std::size_t cols,
                         std::vector<double> values);
  static SimMatrix sparse(Direction direction, std::size_t rows, std::size_t cols,
                          std::vector<std::vector<Scored>> rows_topk, double fill);

  Direction direction() const noexcept { return direction_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_sparse() const noexcept { return sparse_; }
  double fill() const noexcept { return fill_; }

  double at(std::size_t row, std::size_t col) const;

  // Dense storage only.
  std::span<const double> row(std::size_t r) const;
  // Sparse storage only.
  std::span<const Scored> sparse_row(std::size_t r) const;

  // Materialized row (sparse tails filled with fill()).
  std::vector<double> dense_row(std::size_t r) const;

  // Highest-scoring column; ties go to the lowest column id.
  EntityId argmax(std::size_t r) const;

  // K best columns of a row, descending, ties by ascending id.
  std::vector<Scored> top_k(std::size_t r, std::size_t k) const;

  // Same scores viewed from the other KG. Dense only.
  SimMatrix transposed() const;

  // Sparse top-K view of this matrix. Fill is the smallest score observed
  // outside the kept entries (or the smallest kept score if none).
  SimMatrix to_top_k(std::size_t k) const;

 private:
  Direction direction_ = Direction::SourceToTarget;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  bool sparse_ = false;
  double fill_ = 0.0;
  std::vector<double> values_;
  std::vector<std::vector<Scored>> topk_;
};

// Indices of the k largest values, descending, ties by ascending index.
std::vector<Scored> top_k_of(std::span<const double> values, std::size_t k);

}  // namespace stea
