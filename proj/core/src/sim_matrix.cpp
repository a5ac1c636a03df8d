#include "stea/sim_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stea {

namespace {

bool scored_before(const Scored& a, const Scored& b) {
  return a.score != b.score ? a.score > b.score : a.id < b.id;
}

void check_finite(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("similarity scores must be finite");
}

}  // namespace

std::vector<Scored> top_k_of(std::span<const double> values, std::size_t k) {
  std::vector<Scored> all(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    all[i] = Scored{static_cast<EntityId>(i), values[i]};
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end(), scored_before);
  all.resize(k);
  return all;
}

SimMatrix SimMatrix::dense(Direction direction, std::size_t rows, std::size_t cols,
                           std::vector<double> values) {
  if (values.size() != rows * cols) throw std::invalid_argument("dense matrix size mismatch");
  for (double v : values) check_finite(v);
  SimMatrix m;
  m.direction_ = direction;
  m.rows_ = rows;
  m.cols_ = cols;
  m.values_ = std::move(values);
  return m;
}

SimMatrix SimMatrix::sparse(Direction direction, std::size_t rows, std::size_t cols,
                            std::vector<std::vector<Scored>> rows_topk, double fill) {
  if (rows_topk.size() != rows) throw std::invalid_argument("sparse matrix row count mismatch");
  check_finite(fill);
  for (auto& row : rows_topk) {
    for (const auto& s : row) {
      check_finite(s.score);
      if (s.id >= cols) throw std::out_of_range("sparse matrix column id out of range");
    }
    std::sort(row.begin(), row.end(), scored_before);
    for (std::size_t i = 1; i < row.size(); ++i)
      if (row[i].id == row[i - 1].id) throw std::invalid_argument("duplicate column in sparse row");
  }
  SimMatrix m;
  m.direction_ = direction;
  m.rows_ = rows;
  m.cols_ = cols;
  m.sparse_ = true;
  m.fill_ = fill;
  m.topk_ = std::move(rows_topk);
  return m;
}

double SimMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("SimMatrix::at");
  if (!sparse_) return values_[r * cols_ + c];
  for (const auto& s : topk_[r])
    if (s.id == c) return s.score;
  return fill_;
}

std::span<const double> SimMatrix::row(std::size_t r) const {
  if (sparse_) throw std::logic_error("SimMatrix::row on sparse storage");
  if (r >= rows_) throw std::out_of_range("SimMatrix::row");
  return std::span<const double>(values_).subspan(r * cols_, cols_);
}

std::span<const Scored> SimMatrix::sparse_row(std::size_t r) const {
  if (!sparse_) throw std::logic_error("SimMatrix::sparse_row on dense storage");
  return topk_.at(r);
}

std::vector<double> SimMatrix::dense_row(std::size_t r) const {
  if (!sparse_) {
    auto v = row(r);
    return {v.begin(), v.end()};
  }
  std::vector<double> out(cols_, fill_);
  for (const auto& s : topk_.at(r)) out[s.id] = s.score;
  return out;
}

EntityId SimMatrix::argmax(std::size_t r) const {
  if (cols_ == 0) return kNoEntity;
  if (!sparse_) {
    auto v = row(r);
    return static_cast<EntityId>(std::max_element(v.begin(), v.end()) - v.begin());
  }
  const auto& top = topk_.at(r);
  // A tail column (lowest id not listed) can tie with or beat the listed best.
  EntityId tail_id = kNoEntity;
  if (top.size() < cols_) {
    std::vector<EntityId> ids;
    for (const auto& s : top) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    EntityId candidate = 0;
    for (EntityId id : ids) {
      if (id != candidate) break;
      ++candidate;
    }
    tail_id = candidate;
  }
  if (top.empty()) return tail_id;
  const Scored best = top.front();
  if (tail_id != kNoEntity &&
      (fill_ > best.score || (fill_ == best.score && tail_id < best.id)))
    return tail_id;
  return best.id;
}

std::vector<Scored> SimMatrix::top_k(std::size_t r, std::size_t k) const {
  if (!sparse_) return top_k_of(row(r), k);
  return top_k_of(dense_row(r), k);
}

SimMatrix SimMatrix::transposed() const {
  if (sparse_) throw std::logic_error("cannot transpose sparse similarity matrix");
  std::vector<double> t(values_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t[c * rows_ + r] = values_[r * cols_ + c];
  return dense(reverse(direction_), cols_, rows_, std::move(t));
}

SimMatrix SimMatrix::to_top_k(std::size_t k) const {
  std::vector<std::vector<Scored>> rows(rows_);
  double fill = std::numeric_limits<double>::infinity();
  double lowest_kept = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto full = dense_row(r);
    rows[r] = top_k_of(full, k);
    std::vector<bool> kept(cols_, false);
    for (const auto& s : rows[r]) {
      kept[s.id] = true;
      lowest_kept = std::min(lowest_kept, s.score);
    }
    for (std::size_t c = 0; c < cols_; ++c)
      if (!kept[c]) fill = std::min(fill, full[c]);
  }
  if (!std::isfinite(fill)) fill = std::isfinite(lowest_kept) ? lowest_kept : 0.0;
  return sparse(direction_, rows_, cols_, std::move(rows), fill);
}

}  // namespace stea
