#include "stea/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "stea/rng.hpp"

namespace stea {

TwinKgs make_twin_kgs(const TwinKgOptions& o) {
  if (o.entities < 3 || o.relations == 0) throw std::invalid_argument("twin KG too small");
  if (o.triples > o.entities * o.entities * o.relations / 4)
    throw std::invalid_argument("twin KG too dense");
  if (!(o.perturbation >= 0.0 && o.perturbation <= 1.0))
    throw std::invalid_argument("perturbation must lie in [0, 1]");
  Rng rng(o.seed);

  std::vector<std::vector<EntityId>> tail_pools(o.relations);
  for (std::size_t r = 0; r < o.relations; ++r) {
    const std::size_t size = std::max<std::size_t>(
        5, o.entities * (r + 1) / o.relations);
    std::vector<EntityId> all(o.entities);
    std::iota(all.begin(), all.end(), 0u);
    rng.shuffle(std::span<EntityId>(all));
    tail_pools[r].assign(all.begin(), all.begin() + static_cast<long>(std::min(size, o.entities)));
  }

  auto random_triple = [&]() {
    const auto r = static_cast<RelationId>(rng.uniform_index(o.relations));
    const auto h = static_cast<EntityId>(rng.uniform_index(o.entities));
    const auto& pool = tail_pools[r];
    EntityId t = pool[rng.uniform_index(pool.size())];
    return Triple{h, r, t};
  };

  std::vector<Triple> source;
  std::set<Triple> seen;
  while (source.size() < o.triples) {
    const Triple t = random_triple();
    if (t.head == t.tail || !seen.insert(t).second) continue;
    source.push_back(t);
  }

  std::vector<Triple> target = source;
  const auto n_perturb = static_cast<std::size_t>(
      std::llround(o.perturbation * static_cast<double>(target.size())));
  std::vector<std::size_t> idx(target.size());
  std::iota(idx.begin(), idx.end(), 0u);
  rng.shuffle(std::span<std::size_t>(idx));
  std::set<Triple> target_seen(target.begin(), target.end());
  for (std::size_t i = 0; i < n_perturb; ++i) {
    Triple& slot = target[idx[i]];
    target_seen.erase(slot);
    Triple fresh{};
    do {
      fresh = random_triple();
    } while (fresh.head == fresh.tail || target_seen.count(fresh));
    target_seen.insert(fresh);
    slot = fresh;
  }

  // Target ids are a permutation of source ids so that id order carries no
  // alignment signal.
  std::vector<EntityId> perm(o.entities);
  std::iota(perm.begin(), perm.end(), 0u);
  rng.shuffle(std::span<EntityId>(perm));
  std::vector<EntityId> inverse(o.entities);
  for (std::size_t i = 0; i < o.entities; ++i) inverse[perm[i]] = static_cast<EntityId>(i);

  KgBuilder sb;
  KgBuilder tb;
  for (std::size_t i = 0; i < o.entities; ++i) sb.add_entity("s" + std::to_string(i));
  for (std::size_t i = 0; i < o.entities; ++i) tb.add_entity("t" + std::to_string(inverse[i]));
  for (std::size_t r = 0; r < o.relations; ++r) {
    sb.add_relation("rel" + std::to_string(r));
    tb.add_relation("prop" + std::to_string(r));
  }
  for (const auto& t : source) sb.add_triple(t);
  for (const auto& t : target) tb.add_triple(Triple{perm[t.head], t.relation, perm[t.tail]});

  TwinKgs out;
  out.pair = KgPair(std::make_shared<const Kg>(std::move(sb).build()),
                    std::make_shared<const Kg>(std::move(tb).build()));
  std::vector<Link> links;
  for (std::size_t i = 0; i < o.entities; ++i)
    links.push_back(Link{static_cast<EntityId>(i), perm[i]});
  out.links = MappingSet(MappingKind::Labelled, std::move(links));
  return out;
}

}  // namespace stea
