#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stea/types.hpp"

namespace stea {

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  auto operator<=>(const Triple&) const = default;
};

// One adjacency entry: the relation and the entity at the other end.
struct Neighbor {
  RelationId relation;
  EntityId entity;
};

// Immutable knowledge graph over interned entity and relation labels.
//
// Adjacency is stored in CSR form. Each entity's out- and in-lists are sorted
// by (neighbor, relation) so that `edges_between` is a binary search.
class Kg {
 public:
  Kg() = default;

  std::size_t num_entities() const noexcept { return entity_labels_.size(); }
  std::size_t num_relations() const noexcept { return relation_labels_.size(); }
  std::span<const Triple> triples() const noexcept { return triples_; }

  // Triples r(e, n): entries (r, n).
  std::span<const Neighbor> out(EntityId e) const;
  // Triples r(n, e): entries (r, n).
  std::span<const Neighbor> in(EntityId e) const;

  // Entries of out(from) whose neighbor is `to`.
  std::span<const Neighbor> out_to(EntityId from, EntityId to) const;
  // Entries of in(at) whose neighbor is `from`, i.e. triples r(from, at).
  std::span<const Neighbor> in_from(EntityId at, EntityId from) const;

  bool has_triple(EntityId head, RelationId relation, EntityId tail) const;

  // Distinct neighbors over both directions, sorted, excluding e itself.
  std::vector<EntityId> neighbors(EntityId e) const;

  const std::string& entity_label(EntityId e) const { return entity_labels_.at(e); }
  const std::string& relation_label(RelationId r) const { return relation_labels_.at(r); }
  std::optional<EntityId> find_entity(std::string_view label) const;
  std::optional<RelationId> find_relation(std::string_view label) const;

  // Exact duplicate triples dropped while building.
  std::size_t duplicates_dropped() const noexcept { return duplicates_dropped_; }

 private:
  friend class KgBuilder;

  std::vector<std::string> entity_labels_;
  std::vector<std::string> relation_labels_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::unordered_map<std::string, RelationId> relation_ids_;
  std::vector<Triple> triples_;
  std::vector<std::size_t> out_offsets_;
  std::vector<Neighbor> out_edges_;
  std::vector<std::size_t> in_offsets_;
  std::vector<Neighbor> in_edges_;
  std::size_t duplicates_dropped_ = 0;
};

// Accumulates labels and triples; ids are assigned by first appearance.
class KgBuilder {
 public:
  EntityId add_entity(std::string_view label);
  RelationId add_relation(std::string_view label);
  void add_triple(std::string_view head, std::string_view relation, std::string_view tail);
  void add_triple(const Triple& t);

  std::size_t num_entities() const noexcept { return kg_.entity_labels_.size(); }
  std::size_t num_relations() const noexcept { return kg_.relation_labels_.size(); }

  Kg build() &&;

 private:
  Kg kg_;
  std::vector<Triple> pending_;
};

// Reads "head<TAB>relation<TAB>tail" lines (LF or CRLF; blank lines skipped)
// into `builder`. Returns the number of triple lines read.
std::size_t read_triples(std::istream& in, KgBuilder& builder, const std::string& origin);
std::size_t read_triples(const std::filesystem::path& path, KgBuilder& builder);

// Throws ParseError on malformed lines, std::runtime_error for an empty or
// unreadable file.
Kg load_kg(const std::filesystem::path& path);

void write_triples(std::ostream& out, const Kg& kg);

// Source graph G and target graph G'. Copies share the underlying graphs.
class KgPair {
 public:
  KgPair() = default;
  KgPair(std::shared_ptr<const Kg> source, std::shared_ptr<const Kg> target);

  const Kg& source() const { return *source_; }
  const Kg& target() const { return *target_; }
  const std::shared_ptr<const Kg>& source_ptr() const noexcept { return source_; }
  const std::shared_ptr<const Kg>& target_ptr() const noexcept { return target_; }

  // Treats G' as the source. swapped().swapped() is the original pair.
  KgPair swapped() const { return KgPair(target_, source_); }

  // Pair oriented so that the row KG of `d` is the source.
  KgPair oriented(Direction d) const {
    return d == Direction::SourceToTarget ? *this : swapped();
  }

 private:
  std::shared_ptr<const Kg> source_ = std::make_shared<const Kg>();
  std::shared_ptr<const Kg> target_ = std::make_shared<const Kg>();
};

// An entity together with its one-hop neighbours (both directions).
struct FactorSubset {
  EntityId anchor;
  std::vector<EntityId> members;  // sorted, unique, contains anchor
};

// All entities sharing a factor subset with the anchor: the anchor plus its
// undirected two-hop neighbourhood.
struct MarkovBlanket {
  EntityId anchor;
  std::vector<EntityId> members;  // sorted, unique, contains anchor
};

FactorSubset factor_subset(const Kg& kg, EntityId e);
MarkovBlanket markov_blanket(const Kg& kg, EntityId u);

}  // namespace stea
