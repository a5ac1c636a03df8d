#include "stea/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "stea/parallel.hpp"

namespace stea {

std::size_t rank_of(std::span<const double> scores, EntityId truth) {
  if (truth >= scores.size()) throw std::invalid_argument("truth outside the row");
  const double t = scores[truth];
  std::size_t rank = 1;
  for (std::size_t c = 0; c < scores.size(); ++c)
    if (scores[c] > t || (scores[c] == t && c < truth)) ++rank;
  return rank;
}

namespace {

std::vector<std::size_t> ranks(std::span<const std::vector<double>> rows,
                               std::span<const EntityId> truths) {
  if (rows.size() != truths.size()) throw std::invalid_argument("one truth per row required");
  if (rows.empty()) throw std::invalid_argument("no rows to evaluate");
  std::vector<std::size_t> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (truths[i] == kNoEntity) throw std::invalid_argument("row without a truth");
    out[i] = rank_of(rows[i], truths[i]);
  }
  return out;
}

EvalReport summarize(std::span<const std::size_t> rs) {
  EvalReport r;
  r.n = rs.size();
  std::size_t h1 = 0, h10 = 0;
  double rr = 0.0;
  for (std::size_t k : rs) {
    h1 += k <= 1;
    h10 += k <= 10;
    rr += 1.0 / static_cast<double>(k);
  }
  const double n = static_cast<double>(rs.size());
  r.hit1 = static_cast<double>(h1) / n;
  r.hit10 = static_cast<double>(h10) / n;
  r.mrr = rr / n;
  return r;
}

}  // namespace

double hit_at_k(std::span<const std::vector<double>> rows, std::span<const EntityId> truths,
                std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const auto rs = ranks(rows, truths);
  const auto hits = std::count_if(rs.begin(), rs.end(), [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(rs.size());
}

double mrr(std::span<const std::vector<double>> rows, std::span<const EntityId> truths) {
  return summarize(ranks(rows, truths)).mrr;
}

EvalReport evaluate(std::span<const std::vector<double>> rows, std::span<const EntityId> truths) {
  return summarize(ranks(rows, truths));
}

EvalReport evaluate_alignment(const SimMatrix& sim, const MappingSet& test, unsigned threads) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  const bool forward = sim.direction() == Direction::SourceToTarget;
  std::vector<EntityId> cols;
  for (const auto& l : test) cols.push_back(forward ? l.target : l.source);
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  for (EntityId c : cols)
    if (c >= sim.cols()) throw std::out_of_range("test entity outside the similarity matrix");

  const auto links = test.links();
  std::vector<std::size_t> rs(links.size());
  parallel_for(links.size(), threads, [&](std::size_t i) {
    const EntityId row = forward ? links[i].source : links[i].target;
    const EntityId truth = forward ? links[i].target : links[i].source;
    if (row >= sim.rows()) throw std::out_of_range("test entity outside the similarity matrix");
    const double t = sim.at(row, truth);
    std::size_t rank = 1;
    for (EntityId c : cols) {
      const double s = sim.at(row, c);
      if (s > t || (s == t && c < truth)) ++rank;
    }
    rs[i] = rank;
  });
  return summarize(rs);
}

PseudoQuality pseudo_quality(const MappingSet& pseudo, const MappingSet& truth) {
  PseudoQuality q;
  q.count = pseudo.size();
  q.correct = intersection_size(pseudo, truth);
  q.empty = pseudo.empty();
  q.precision = q.empty ? 1.0 : static_cast<double>(q.correct) / static_cast<double>(q.count);
  q.recall = truth.empty() ? 0.0 : static_cast<double>(q.correct) / static_cast<double>(truth.size());
  return q;
}

}  // namespace stea
