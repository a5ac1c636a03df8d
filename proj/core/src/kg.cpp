#include "stea/kg.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace stea {

namespace {

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.entity != b.entity ? a.entity < b.entity : a.relation < b.relation;
}

std::span<const Neighbor> slice(const std::vector<std::size_t>& offsets,
                                const std::vector<Neighbor>& edges, EntityId e) {
  if (static_cast<std::size_t>(e) + 1 >= offsets.size())
    throw std::out_of_range("entity id " + std::to_string(e) + " out of range");
  return std::span<const Neighbor>(edges).subspan(offsets[e], offsets[e + 1] - offsets[e]);
}

std::span<const Neighbor> range_to(std::span<const Neighbor> edges, EntityId to) {
  auto lo = std::lower_bound(edges.begin(), edges.end(), to,
                             [](const Neighbor& n, EntityId v) { return n.entity < v; });
  auto hi = std::upper_bound(lo, edges.end(), to,
                             [](EntityId v, const Neighbor& n) { return v < n.entity; });
  return {lo, hi};
}

void build_csr(std::size_t n, const std::vector<Triple>& triples, bool outgoing,
               std::vector<std::size_t>& offsets, std::vector<Neighbor>& edges) {
  offsets.assign(n + 1, 0);
  for (const auto& t : triples) ++offsets[(outgoing ? t.head : t.tail) + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  edges.resize(triples.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& t : triples) {
    const EntityId at = outgoing ? t.head : t.tail;
    edges[cursor[at]++] = Neighbor{t.relation, outgoing ? t.tail : t.head};
  }
  for (std::size_t i = 0; i < n; ++i)
    std::sort(edges.begin() + offsets[i], edges.begin() + offsets[i + 1], neighbor_less);
}

}  // namespace

std::span<const Neighbor> Kg::out(EntityId e) const { return slice(out_offsets_, out_edges_, e); }
std::span<const Neighbor> Kg::in(EntityId e) const { return slice(in_offsets_, in_edges_, e); }

std::span<const Neighbor> Kg::out_to(EntityId from, EntityId to) const {
  return range_to(out(from), to);
}

std::span<const Neighbor> Kg::in_from(EntityId at, EntityId from) const {
  return range_to(in(at), from);
}

bool Kg::has_triple(EntityId head, RelationId relation, EntityId tail) const {
  for (const auto& n : out_to(head, tail))
    if (n.relation == relation) return true;
  return false;
}

std::vector<EntityId> Kg::neighbors(EntityId e) const {
  std::vector<EntityId> result;
  for (const auto& n : out(e)) result.push_back(n.entity);
  for (const auto& n : in(e)) result.push_back(n.entity);
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  result.erase(std::remove(result.begin(), result.end(), e), result.end());
  return result;
}

std::optional<EntityId> Kg::find_entity(std::string_view label) const {
  auto it = entity_ids_.find(std::string(label));
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Kg::find_relation(std::string_view label) const {
  auto it = relation_ids_.find(std::string(label));
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

EntityId KgBuilder::add_entity(std::string_view label) {
  auto [it, inserted] = kg_.entity_ids_.try_emplace(
      std::string(label), static_cast<EntityId>(kg_.entity_labels_.size()));
  if (inserted) kg_.entity_labels_.emplace_back(label);
  return it->second;
}

RelationId KgBuilder::add_relation(std::string_view label) {
  auto [it, inserted] = kg_.relation_ids_.try_emplace(
      std::string(label), static_cast<RelationId>(kg_.relation_labels_.size()));
  if (inserted) kg_.relation_labels_.emplace_back(label);
  return it->second;
}

void KgBuilder::add_triple(std::string_view head, std::string_view relation,
                           std::string_view tail) {
  const EntityId h = add_entity(head);
  const RelationId r = add_relation(relation);
  const EntityId t = add_entity(tail);
  pending_.push_back(Triple{h, r, t});
}

void KgBuilder::add_triple(const Triple& t) {
  if (t.head >= num_entities() || t.tail >= num_entities() || t.relation >= num_relations())
    throw std::out_of_range("add_triple: id not interned");
  pending_.push_back(t);
}

Kg KgBuilder::build() && {
  // Keep first-appearance order while dropping exact duplicates.
  std::vector<Triple> sorted = pending_;
  std::sort(sorted.begin(), sorted.end());
  std::vector<bool> seen(sorted.size(), false);
  kg_.triples_.clear();
  kg_.triples_.reserve(pending_.size());
  for (const auto& t : pending_) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
    if (seen[idx]) {
      ++kg_.duplicates_dropped_;
      continue;
    }
    seen[idx] = true;
    kg_.triples_.push_back(t);
  }
  const std::size_t n = kg_.entity_labels_.size();
  build_csr(n, kg_.triples_, true, kg_.out_offsets_, kg_.out_edges_);
  build_csr(n, kg_.triples_, false, kg_.in_offsets_, kg_.in_edges_);
  pending_.clear();
  return std::move(kg_);
}

std::size_t read_triples(std::istream& in, KgBuilder& builder, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto first = line.find('\t');
    const auto second = first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos || line.find('\t', second + 1) != std::string::npos)
      throw ParseError(origin, line_no, "expected exactly three tab-separated fields");
    const std::string_view view(line);
    const auto head = view.substr(0, first);
    const auto rel = view.substr(first + 1, second - first - 1);
    const auto tail = view.substr(second + 1);
    if (head.empty() || rel.empty() || tail.empty())
      throw ParseError(origin, line_no, "empty field");
    builder.add_triple(head, rel, tail);
    ++count;
  }
  return count;
}

std::size_t read_triples(const std::filesystem::path& path, KgBuilder& builder) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open triple file " + path.string());
  const std::size_t n = read_triples(in, builder, path.string());
  if (n == 0) throw std::runtime_error("triple file " + path.string() + " is empty");
  return n;
}

Kg load_kg(const std::filesystem::path& path) {
  KgBuilder builder;
  read_triples(path, builder);
  return std::move(builder).build();
}

void write_triples(std::ostream& out, const Kg& kg) {
  for (const auto& t : kg.triples())
    out << kg.entity_label(t.head) << '\t' << kg.relation_label(t.relation) << '\t'
        << kg.entity_label(t.tail) << '\n';
}

KgPair::KgPair(std::shared_ptr<const Kg> source, std::shared_ptr<const Kg> target)
    : source_(std::move(source)), target_(std::move(target)) {
  if (!source_ || !target_) throw std::invalid_argument("KgPair: null graph");
}

FactorSubset factor_subset(const Kg& kg, EntityId e) {
  FactorSubset f{e, kg.neighbors(e)};
  f.members.insert(std::lower_bound(f.members.begin(), f.members.end(), e), e);
  return f;
}

MarkovBlanket markov_blanket(const Kg& kg, EntityId u) {
  std::vector<EntityId> members{u};
  for (EntityId n : kg.neighbors(u)) {
    members.push_back(n);
    for (EntityId m : kg.neighbors(n)) members.push_back(m);
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return MarkovBlanket{u, std::move(members)};
}

}  // namespace stea
