#include "stea/compatibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "stea/parallel.hpp"

namespace stea {

RelationStats::RelationStats(std::size_t source_relations, std::size_t target_relations) {
  inv_fun_[0].assign(2 * source_relations, 0.0);
  inv_fun_[1].assign(2 * target_relations, 0.0);
  subrel_default_[0].assign(2 * source_relations, 0.0);
  subrel_default_[1].assign(2 * target_relations, 0.0);
}

double RelationStats::inv_fun(Side side, DirRel r) const {
  return inv_fun_[static_cast<int>(side)].at(r);
}

void RelationStats::set_inv_fun(Side side, DirRel r, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("inv_fun outside [0, 1]");
  inv_fun_[static_cast<int>(side)].at(r) = value;
}

double RelationStats::subrel(Side left_side, DirRel left, DirRel right) const {
  const int s = static_cast<int>(left_side);
  const auto& map = subrel_[s];
  if (!map.empty()) {
    auto it = map.find(key(left, right));
    if (it != map.end()) return it->second;
  }
  return subrel_default_[s].at(left);
}

void RelationStats::set_subrel(Side left_side, DirRel left, DirRel right, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("subrel outside [0, 1]");
  const int s = static_cast<int>(left_side);
  if (left >= subrel_default_[s].size() ||
      right >= subrel_default_[static_cast<int>(other(left_side))].size())
    throw std::out_of_range("subrel relation id out of range");
  subrel_[s][key(left, right)] = value;
}

void RelationStats::set_subrel_default(Side left_side, DirRel left, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("subrel outside [0, 1]");
  subrel_default_[static_cast<int>(left_side)].at(left) = value;
}

RelationStats RelationStats::swapped() const {
  RelationStats s;
  for (int i = 0; i < 2; ++i) {
    s.inv_fun_[i] = inv_fun_[1 - i];
    s.subrel_default_[i] = subrel_default_[1 - i];
    s.subrel_[i] = subrel_[1 - i];
  }
  return s;
}

void Assignment::assign(EntityId e, EntityId counterpart, bool labelled) {
  if (labelled_.at(e) && value_[e] != counterpart)
    throw std::logic_error("cannot reassign a labelled entity");
  value_[e] = counterpart;
  labelled_[e] = labelled_[e] || labelled;
}

void Assignment::clear(EntityId e) {
  if (labelled_.at(e)) throw std::logic_error("cannot clear a labelled entity");
  value_[e] = kNoEntity;
}

Assignment Assignment::from_labelled(std::size_t num_entities, const MappingSet& labelled) {
  Assignment a(num_entities);
  for (const auto& l : labelled) {
    if (l.source >= num_entities) throw std::out_of_range("labelled source id out of range");
    if (a.labelled(l.source)) continue;  // first link wins for one-to-many seeds
    a.assign(l.source, l.target, true);
  }
  return a;
}

std::vector<std::vector<EntityId>> Assignment::inverse(std::size_t num_targets) const {
  std::vector<std::vector<EntityId>> inv(num_targets);
  for (std::size_t e = 0; e < value_.size(); ++e)
    if (value_[e] != kNoEntity) inv.at(value_[e]).push_back(static_cast<EntityId>(e));
  return inv;
}

Assignment make_assignment(std::size_t num_entities, const MappingSet& labelled,
                           std::span<const ProbRow> q_rows) {
  Assignment a = Assignment::from_labelled(num_entities, labelled);
  for (const auto& row : q_rows) {
    if (row.source >= num_entities) throw std::out_of_range("q row source out of range");
    if (a.labelled(row.source)) continue;
    const EntityId best = row.argmax();
    if (best != kNoEntity) a.assign(row.source, best);
  }
  return a;
}

namespace {

struct RelationCounts {
  std::vector<std::size_t> trials;                      // per left DirRel
  std::unordered_map<std::uint64_t, std::size_t> support;  // (left, right) -> count
};

std::uint64_t pack(DirRel a, DirRel b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

void fill_inv_fun(RelationStats& stats, Side side, const Kg& kg) {
  const std::size_t n = kg.num_relations();
  std::vector<std::vector<EntityId>> heads(n), tails(n);
  for (const auto& t : kg.triples()) {
    heads[t.relation].push_back(t.head);
    tails[t.relation].push_back(t.tail);
  }
  auto distinct = [](std::vector<EntityId>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<double>(std::unique(v.begin(), v.end()) - v.begin());
  };
  for (RelationId r = 0; r < n; ++r) {
    const double count = static_cast<double>(heads[r].size());
    if (count == 0.0) continue;
    stats.set_inv_fun(side, forward_rel(r), distinct(tails[r]) / count);
    stats.set_inv_fun(side, inverse_rel(r), distinct(heads[r]) / count);
  }
}

// Counts for relations of `left` against `right`, where `counterparts[x]`
// lists the right-side entities standing for left entity x.
RelationCounts count_subrelations(const Kg& left, const Kg& right,
                                  const std::vector<std::vector<EntityId>>& counterparts) {
  RelationCounts c;
  c.trials.assign(2 * left.num_relations(), 0);
  std::vector<std::pair<DirRel, DirRel>> hits;
  for (const auto& t : left.triples()) {
    const auto& hs = counterparts[t.head];
    const auto& ts = counterparts[t.tail];
    if (hs.empty() || ts.empty()) continue;
    ++c.trials[forward_rel(t.relation)];
    ++c.trials[inverse_rel(t.relation)];
    hits.clear();
    for (EntityId x : hs) {
      for (EntityId y : ts) {
        for (const auto& nb : right.out_to(x, y)) {
          hits.emplace_back(forward_rel(t.relation), forward_rel(nb.relation));
          hits.emplace_back(inverse_rel(t.relation), inverse_rel(nb.relation));
        }
        for (const auto& nb : right.in_from(x, y)) {  // nb.relation(y, x)
          hits.emplace_back(forward_rel(t.relation), inverse_rel(nb.relation));
          hits.emplace_back(inverse_rel(t.relation), forward_rel(nb.relation));
        }
      }
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    for (const auto& [a, b] : hits) ++c.support[pack(a, b)];
  }
  return c;
}

void apply_counts(RelationStats& stats, Side side, const RelationCounts& c) {
  for (DirRel a = 0; a < c.trials.size(); ++a)
    stats.set_subrel_default(side, a, 1.0 / (static_cast<double>(c.trials[a]) + 2.0));
  for (const auto& [k, support] : c.support) {
    const auto a = static_cast<DirRel>(k >> 32);
    const auto b = static_cast<DirRel>(k & 0xffffffffu);
    stats.set_subrel(side, a, b,
                     (static_cast<double>(support) + 1.0) /
                         (static_cast<double>(c.trials[a]) + 2.0));
  }
}

// Factor for one aligned pair r(e, n) ~ r'(y_e, n') with [y_n = n'] = 1.
inline double survival(const RelationStats& stats, DirRel source_rel, DirRel target_rel) {
  return (1.0 - stats.subrel(Side::Target, target_rel, source_rel) *
                    stats.inv_fun(Side::Source, source_rel)) *
         (1.0 - stats.subrel(Side::Source, source_rel, target_rel) *
                    stats.inv_fun(Side::Target, target_rel));
}

// g at `anchor` with y_anchor = anchor_value and, optionally, y_over = over_value.
double compatibility_at(const KgPair& pair, const RelationStats& stats,
                        const Assignment& assignment, EntityId anchor, EntityId anchor_value,
                        EntityId over = kNoEntity, EntityId over_value = kNoEntity) {
  const Kg& g = pair.source();
  const Kg& gt = pair.target();
  auto value_of = [&](EntityId n) {
    if (n == anchor) return anchor_value;
    if (n == over) return over_value;
    return assignment.at(n);
  };
  double survive = 1.0;
  for (const auto& nb : g.out(anchor)) {
    const EntityId m = value_of(nb.entity);
    if (m == kNoEntity) continue;
    for (const auto& tb : gt.out_to(anchor_value, m))
      survive *= survival(stats, forward_rel(nb.relation), forward_rel(tb.relation));
  }
  for (const auto& nb : g.in(anchor)) {
    const EntityId m = value_of(nb.entity);
    if (m == kNoEntity) continue;
    for (const auto& tb : gt.in_from(anchor_value, m))
      survive *= survival(stats, inverse_rel(nb.relation), inverse_rel(tb.relation));
  }
  return 1.0 - survive;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (double& x : p) {
    x = std::exp(x - m);
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

// Direct evaluation of g by scanning every triple of both graphs.
// `values[x]` is y_x for source entity x (kNoEntity when unassigned).
double compatibility_by_scan(const KgPair& pair, const RelationStats& stats,
                             std::span<const EntityId> values, EntityId e) {
  const EntityId ye = values[e];
  double survive = 1.0;
  for (const auto& s : pair.source().triples()) {
    for (int orient = 0; orient < 2; ++orient) {
      const EntityId at = orient == 0 ? s.head : s.tail;
      const EntityId other_end = orient == 0 ? s.tail : s.head;
      if (at != e) continue;
      const EntityId yn = values[other_end];
      if (yn == kNoEntity) continue;
      for (const auto& t : pair.target().triples()) {
        const EntityId t_at = orient == 0 ? t.head : t.tail;
        const EntityId t_other = orient == 0 ? t.tail : t.head;
        if (t_at != ye || t_other != yn) continue;
        const DirRel a = orient == 0 ? forward_rel(s.relation) : inverse_rel(s.relation);
        const DirRel b = orient == 0 ? forward_rel(t.relation) : inverse_rel(t.relation);
        survive *= (1.0 - stats.subrel(Side::Target, b, a) * stats.inv_fun(Side::Source, a)) *
                   (1.0 - stats.subrel(Side::Source, a, b) * stats.inv_fun(Side::Target, b));
      }
    }
  }
  return 1.0 - survive;
}

}  // namespace

RelationStats estimate_relation_stats(const KgPair& pair, const Assignment& assignment) {
  const Kg& g = pair.source();
  const Kg& gt = pair.target();
  if (assignment.size() != g.num_entities())
    throw std::invalid_argument("assignment size does not match the source KG");
  RelationStats stats(g.num_relations(), gt.num_relations());
  fill_inv_fun(stats, Side::Source, g);
  fill_inv_fun(stats, Side::Target, gt);

  std::vector<std::vector<EntityId>> forward(g.num_entities());
  for (EntityId e = 0; e < g.num_entities(); ++e) {
    if (!assignment.assigned(e)) continue;
    if (assignment.at(e) >= gt.num_entities())
      throw std::out_of_range("assignment value out of range");
    forward[e].push_back(assignment.at(e));
  }
  apply_counts(stats, Side::Source, count_subrelations(g, gt, forward));
  apply_counts(stats, Side::Target,
               count_subrelations(gt, g, assignment.inverse(gt.num_entities())));
  return stats;
}

double local_compatibility(const KgPair& pair, const RelationStats& stats,
                           const Assignment& assignment, EntityId e, EntityId candidate) {
  if (candidate >= pair.target().num_entities())
    throw std::out_of_range("candidate id out of range");
  return compatibility_at(pair, stats, assignment, e, candidate);
}

ProbRow ConditionalRow::to_prob_row() const {
  ProbRow row;
  row.source = source;
  row.candidates = candidates;
  row.probs = probs;
  return row;
}

ConditionalRow conditional_distribution(const KgPair& pair, const RelationStats& stats,
                                        const Assignment& assignment, EntityId u,
                                        std::span<const EntityId> candidates) {
  if (candidates.empty()) throw std::invalid_argument("conditional needs candidates");
  ConditionalRow row;
  row.source = u;
  row.candidates.assign(candidates.begin(), candidates.end());
  row.factor_sums.resize(candidates.size());
  const auto neighbours = pair.source().neighbors(u);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const EntityId c = candidates[i];
    if (c >= pair.target().num_entities()) throw std::out_of_range("candidate id out of range");
    double s = compatibility_at(pair, stats, assignment, u, c);
    for (EntityId n : neighbours) {
      if (!assignment.assigned(n)) continue;
      s += compatibility_at(pair, stats, assignment, n, assignment.at(n), u, c);
    }
    row.factor_sums[i] = s;
  }
  row.probs = softmax(row.factor_sums);
  return row;
}

namespace {

std::vector<EntityId> top_candidates(const ProbRow& row, std::size_t k) {
  std::vector<std::size_t> idx(row.probs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const std::size_t keep = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (row.probs[a] != row.probs[b]) return row.probs[a] > row.probs[b];
                      return row.candidates[a] < row.candidates[b];
                    });
  std::vector<EntityId> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(row.candidates[idx[i]]);
  return out;
}

}  // namespace

std::vector<ConditionalRow> derive_q_star(const KgPair& pair, const RelationStats& stats,
                                          const MappingSet& labelled,
                                          std::span<const ProbRow> q_rows,
                                          const QStarOptions& options) {
  if (options.top_k == 0) throw std::invalid_argument("top_k must be at least 1");
  if (options.sweeps == 0) throw std::invalid_argument("sweeps must be at least 1");
  const std::size_t n = pair.source().num_entities();
  Assignment assignment = make_assignment(n, labelled, q_rows);

  std::vector<std::vector<EntityId>> candidates(q_rows.size());
  for (std::size_t i = 0; i < q_rows.size(); ++i) {
    if (q_rows[i].probs.empty()) throw std::invalid_argument("empty q row");
    candidates[i] = top_candidates(q_rows[i], options.top_k);
  }

  std::vector<ConditionalRow> result(q_rows.size());
  for (std::size_t sweep = 0; sweep < options.sweeps; ++sweep) {
    parallel_for(q_rows.size(), options.threads, [&](std::size_t i) {
      const EntityId u = q_rows[i].source;
      if (assignment.labelled(u)) {
        result[i] = ConditionalRow{u, {assignment.at(u)}, {0.0}, {1.0}};
        return;
      }
      result[i] = conditional_distribution(pair, stats, assignment, u, candidates[i]);
    });
    if (sweep + 1 == options.sweeps) break;
    for (const auto& row : result)
      if (!assignment.labelled(row.source)) assignment.assign(row.source, row.to_prob_row().argmax());
  }
  return result;
}

std::size_t JointTable::flat(std::span<const std::size_t> index) const {
  if (index.size() != grids_.size()) throw std::invalid_argument("index arity mismatch");
  std::size_t f = 0;
  for (std::size_t i = 0; i < grids_.size(); ++i) {
    if (index[i] >= grids_[i].size()) throw std::out_of_range("grid index out of range");
    f = f * grids_[i].size() + index[i];
  }
  return f;
}

double JointTable::prob(std::span<const std::size_t> index) const { return probs_[flat(index)]; }

std::vector<double> JointTable::conditional(std::size_t which,
                                            std::span<const std::size_t> index) const {
  std::vector<std::size_t> at(index.begin(), index.end());
  std::vector<double> out(grids_.at(which).size());
  double total = 0.0;
  for (std::size_t v = 0; v < out.size(); ++v) {
    at[which] = v;
    out[v] = probs_[flat(at)];
    total += out[v];
  }
  for (double& p : out) p /= total;
  return out;
}

JointTable joint_bruteforce(const KgPair& pair, const RelationStats& stats,
                            const Assignment& fixed, std::span<const EntityId> free_entities,
                            std::span<const std::vector<EntityId>> grids, std::size_t max_states) {
  if (free_entities.size() != grids.size()) throw std::invalid_argument("one grid per free entity");
  double states = 1.0;
  for (const auto& g : grids) {
    if (g.empty()) throw std::invalid_argument("empty candidate grid");
    states *= static_cast<double>(g.size());
  }
  if (states > static_cast<double>(max_states))
    throw std::invalid_argument("joint state space exceeds the enumeration cap");

  const std::size_t n = pair.source().num_entities();
  std::vector<EntityId> values(n, kNoEntity);
  for (EntityId e = 0; e < n; ++e)
    if (fixed.assigned(e)) values[e] = fixed.at(e);
  for (EntityId e : free_entities) values.at(e) = kNoEntity;

  JointTable table;
  table.free_.assign(free_entities.begin(), free_entities.end());
  table.grids_.assign(grids.begin(), grids.end());
  const auto total_states = static_cast<std::size_t>(states);
  std::vector<double> log_weight(total_states);
  std::vector<std::size_t> index(grids.size(), 0);
  for (std::size_t s = 0; s < total_states; ++s) {
    // Decode s row-major (last free entity fastest).
    std::size_t rest = s;
    for (std::size_t i = grids.size(); i-- > 0;) {
      index[i] = rest % grids[i].size();
      rest /= grids[i].size();
      values[free_entities[i]] = grids[i][index[i]];
    }
    double lw = 0.0;
    for (EntityId e = 0; e < n; ++e)
      if (values[e] != kNoEntity) lw += compatibility_by_scan(pair, stats, values, e);
    log_weight[s] = lw;
  }
  const double m = *std::max_element(log_weight.begin(), log_weight.end());
  double z = 0.0;
  table.probs_.resize(total_states);
  for (std::size_t s = 0; s < total_states; ++s) {
    table.probs_[s] = std::exp(log_weight[s] - m);
    z += table.probs_[s];
  }
  for (double& p : table.probs_) p /= z;
  return table;
}

void write_q_star_debug(std::ostream& out, const KgPair& pair,
                        std::span<const ConditionalRow> rows) {
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.candidates.size(); ++i) {
      std::snprintf(buf, sizeof buf, "\t%.10g\t%.10g\n", row.factor_sums[i], row.probs[i]);
      out << pair.source().entity_label(row.source) << '\t'
          << pair.target().entity_label(row.candidates[i]) << buf;
    }
  }
}

}  // namespace stea
