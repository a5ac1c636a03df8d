#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stea/kg.hpp"
#include "stea/types.hpp"

namespace stea {

enum class MappingKind : std::uint8_t { Labelled, Pseudo };

struct Link {
  EntityId source;
  EntityId target;
  double score = 0.0;  // provenance only; not part of identity
};

// A set of (source, target) entity pairs, kept sorted by (source, target).
class MappingSet {
 public:
  explicit MappingSet(MappingKind kind = MappingKind::Labelled) : kind_(kind) {}
  // Duplicated pairs keep the first occurrence.
  MappingSet(MappingKind kind, std::vector<Link> links);

  MappingKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return links_.size(); }
  bool empty() const noexcept { return links_.empty(); }
  std::span<const Link> links() const noexcept { return links_; }
  auto begin() const noexcept { return links_.begin(); }
  auto end() const noexcept { return links_.end(); }

  // Returns false if the pair was already present.
  bool insert(const Link& link);
  bool erase(EntityId source, EntityId target);
  bool contains(EntityId source, EntityId target) const;

  // Pairs with (target, source) roles exchanged.
  MappingSet flipped() const;

  // Throws std::out_of_range naming the first id invalid in `pair`.
  void validate(const KgPair& pair) const;

  bool same_pairs(const MappingSet& other) const;

 private:
  MappingKind kind_;
  std::vector<Link> links_;
};

// Set union; links already in `a` keep a's score.
MappingSet unite(const MappingSet& a, const MappingSet& b, MappingKind kind);

std::size_t intersection_size(const MappingSet& a, const MappingSet& b);

// Labelled/test split of a link set.
struct Partition {
  MappingSet labelled{MappingKind::Labelled};
  MappingSet test{MappingKind::Labelled};
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

// Shuffles the links (sorted order, then Rng::shuffle with `seed`) and takes
// the first round(ratio * n) as labelled. Throws std::invalid_argument when
// ratio is outside (0, 1), fewer than two links are given, or either side
// would be empty.
Partition partition_mappings(const MappingSet& links, double ratio, std::uint64_t seed);

// "source<TAB>target" lines; labels are resolved in `pair`. Unknown labels
// raise ParseError.
MappingSet read_links(std::istream& in, const KgPair& pair, MappingKind kind,
                      const std::string& origin);
MappingSet load_links(const std::filesystem::path& path, const KgPair& pair,
                      MappingKind kind = MappingKind::Labelled);

void write_links(std::ostream& out, const MappingSet& links, const KgPair& pair);

// The public benchmark layout: rel_triples_1, rel_triples_2, ent_links.
// Link entities missing from the triple files are still interned.
struct Dataset {
  KgPair pair;
  MappingSet links{MappingKind::Labelled};
};

Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace stea
