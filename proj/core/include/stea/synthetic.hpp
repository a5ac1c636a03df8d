#pragma once

#include <cstddef>
#include <cstdint>

#include "stea/kg.hpp"
#include "stea/mapping.hpp"

namespace stea {

// Structural twin KGs for desk-scale experiments.
//
// The source graph has `triples` distinct random triples over `entities`
// entities and `relations` relations; relation r draws its tails from a
// pool whose size grows with r, so relations span a range of inverse
// functionalities. The target graph is a relabelled copy (entities
// permuted, relations renamed) in which a `perturbation` fraction of the
// triples is replaced by fresh random ones.
struct TwinKgOptions {
  std::size_t entities = 300;
  std::size_t triples = 1200;
  std::size_t relations = 12;
  double perturbation = 0.1;
  std::uint64_t seed = 1;
};

struct TwinKgs {
  KgPair pair;
  MappingSet links{MappingKind::Labelled};
};

TwinKgs make_twin_kgs(const TwinKgOptions& options);

}  // namespace stea
