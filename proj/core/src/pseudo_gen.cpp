#include "stea/pseudo_gen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace stea {

namespace {

constexpr std::array<std::string_view, 6> kStrategyNames = {
    "UniThr", "BiThr", "MutHighestProb", "SimThr", "OneToOne", "MutNearest"};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

Link oriented_link(Direction direction, EntityId row, EntityId col, double score) {
  return direction == Direction::SourceToTarget ? Link{row, col, score} : Link{col, row, score};
}

}  // namespace

std::string_view to_string(Strategy s) noexcept { return kStrategyNames[static_cast<int>(s)]; }

Strategy parse_strategy(std::string_view name) {
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i)
    if (iequals(name, kStrategyNames[i])) return static_cast<Strategy>(i);
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

bool uses_compatibility(Strategy s) noexcept {
  return s == Strategy::UniThr || s == Strategy::BiThr || s == Strategy::MutHighestProb;
}

void StrategyConfig::validate() const {
  const std::string name(to_string(strategy));
  const bool wants_alpha = strategy == Strategy::UniThr || strategy == Strategy::BiThr;
  const bool wants_theta = strategy == Strategy::SimThr || strategy == Strategy::OneToOne;
  if (wants_alpha && !alpha) throw ConfigError("strategy " + name + " requires alpha");
  if (!wants_alpha && alpha) throw ConfigError("strategy " + name + " takes no alpha");
  if (wants_theta && !theta) throw ConfigError("strategy " + name + " requires theta");
  if (!wants_theta && theta) throw ConfigError("strategy " + name + " takes no theta");
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (theta && !std::isfinite(*theta)) throw ConfigError("theta must be finite");
}

LabelMask::LabelMask(const MappingSet& labelled, std::size_t n_source, std::size_t n_target)
    : source_(n_source, false), target_(n_target, false) {
  for (const auto& l : labelled) {
    source_.at(l.source) = true;
    target_.at(l.target) = true;
  }
}

bool LabelMask::row_excluded(Direction direction, EntityId e) const {
  return direction == Direction::SourceToTarget ? source_excluded(e) : target_excluded(e);
}

bool LabelMask::col_excluded(Direction direction, EntityId e) const {
  return direction == Direction::SourceToTarget ? target_excluded(e) : source_excluded(e);
}

MappingSet uni_thr(std::span<const ProbRow> rows, double alpha, Direction direction) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  std::vector<Link> links;
  for (const auto& row : rows) {
    const EntityId best = row.argmax();
    if (best == kNoEntity) continue;
    const double p = row.prob_of(best);
    if (p > alpha) links.push_back(oriented_link(direction, row.source, best, p));
  }
  return MappingSet(MappingKind::Pseudo, std::move(links));
}

MappingSet bi_thr(std::span<const ProbRow> source_rows, std::span<const ProbRow> target_rows,
                  double alpha) {
  return unite(uni_thr(source_rows, alpha, Direction::SourceToTarget),
               uni_thr(target_rows, alpha, Direction::TargetToSource), MappingKind::Pseudo);
}

MappingSet mut_highest_prob(std::span<const ProbRow> source_rows,
                            std::span<const ProbRow> target_rows) {
  std::unordered_map<EntityId, EntityId> back;
  for (const auto& row : target_rows) {
    const EntityId best = row.argmax();
    if (best != kNoEntity) back.emplace(row.source, best);
  }
  std::vector<Link> links;
  for (const auto& row : source_rows) {
    const EntityId best = row.argmax();
    if (best == kNoEntity) continue;
    auto it = back.find(best);
    if (it != back.end() && it->second == row.source)
      links.push_back({row.source, best, row.prob_of(best)});
  }
  return MappingSet(MappingKind::Pseudo, std::move(links));
}

std::optional<Scored> masked_argmax(const SimMatrix& sim, std::size_t row, const LabelMask& mask) {
  const Direction d = sim.direction();
  std::optional<Scored> best;
  auto consider = [&](EntityId c, double s) {
    if (mask.col_excluded(d, c)) return;
    if (!best || s > best->score || (s == best->score && c < best->id)) best = Scored{c, s};
  };
  if (!sim.is_sparse()) {
    const auto values = sim.row(row);
    for (std::size_t c = 0; c < values.size(); ++c) consider(static_cast<EntityId>(c), values[c]);
    return best;
  }
  const auto top = sim.sparse_row(row);
  for (const auto& s : top) consider(s.id, s.score);
  if (top.size() < sim.cols() && (!best || sim.fill() >= best->score)) {
    // The tail may hold the maximum (or an equal score with a lower id).
    const auto full = sim.dense_row(row);
    for (std::size_t c = 0; c < full.size(); ++c) consider(static_cast<EntityId>(c), full[c]);
  }
  return best;
}

MappingSet sim_thr(const SimMatrix& sim, double theta, const LabelMask& mask) {
  std::vector<Link> links;
  for (std::size_t r = 0; r < sim.rows(); ++r) {
    if (mask.row_excluded(sim.direction(), static_cast<EntityId>(r))) continue;
    const auto best = masked_argmax(sim, r, mask);
    if (best && best->score > theta)
      links.push_back(oriented_link(sim.direction(), static_cast<EntityId>(r), best->id,
                                    best->score));
  }
  return MappingSet(MappingKind::Pseudo, std::move(links));
}

namespace {

// Greedy matching over links by descending score, ties by (source, target).
// Earlier entries of `links` win exact ties on equal pairs.
std::vector<Link> greedy_match(std::vector<Link> links) {
  std::stable_sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
  });
  std::unordered_map<EntityId, bool> used_source, used_target;
  std::vector<Link> kept;
  for (const auto& l : links) {
    if (used_source.count(l.source) || used_target.count(l.target)) continue;
    used_source[l.source] = true;
    used_target[l.target] = true;
    kept.push_back(l);
  }
  return kept;
}

}  // namespace

MappingSet one_to_one(const SimMatrix& sim, double theta, const MappingSet& accumulated,
                      const LabelMask& mask) {
  const Direction d = sim.direction();
  std::vector<Link> edges;
  std::vector<double> row_values;
  for (std::size_t r = 0; r < sim.rows(); ++r) {
    const auto row = static_cast<EntityId>(r);
    if (mask.row_excluded(d, row)) continue;
    row_values = sim.dense_row(r);
    for (std::size_t c = 0; c < row_values.size(); ++c) {
      const auto col = static_cast<EntityId>(c);
      if (row_values[c] > theta && !mask.col_excluded(d, col))
        edges.push_back(oriented_link(d, row, col, row_values[c]));
    }
  }
  std::vector<Link> merged = greedy_match(std::move(edges));
  // New pairs first so a re-selected pair carries its current score.
  merged.insert(merged.end(), accumulated.begin(), accumulated.end());
  return MappingSet(MappingKind::Pseudo, greedy_match(std::move(merged)));
}

const MappingSet& OneToOneAccumulator::update(const SimMatrix& sim, double theta,
                                              const LabelMask& mask) {
  current_ = one_to_one(sim, theta, current_, mask);
  return current_;
}

MappingSet mut_nearest(const SimMatrix& forward, const SimMatrix& backward,
                       const LabelMask& mask) {
  if (forward.direction() != Direction::SourceToTarget ||
      backward.direction() != Direction::TargetToSource)
    throw std::invalid_argument("mut_nearest expects forward and backward matrices");
  if (forward.rows() != backward.cols() || forward.cols() != backward.rows())
    throw std::invalid_argument("mut_nearest matrix shapes disagree");
  std::vector<std::optional<Scored>> back(backward.rows());
  std::vector<bool> computed(backward.rows(), false);
  std::vector<Link> links;
  for (std::size_t r = 0; r < forward.rows(); ++r) {
    if (mask.source_excluded(static_cast<EntityId>(r))) continue;
    const auto best = masked_argmax(forward, r, mask);
    if (!best) continue;
    if (!computed[best->id]) {
      back[best->id] = masked_argmax(backward, best->id, mask);
      computed[best->id] = true;
    }
    if (back[best->id] && back[best->id]->id == r)
      links.push_back({static_cast<EntityId>(r), best->id, best->score});
  }
  return MappingSet(MappingKind::Pseudo, std::move(links));
}

}  // namespace stea
