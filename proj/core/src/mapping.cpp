#include "stea/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "stea/rng.hpp"

namespace stea {

namespace {

bool pair_less(const Link& a, const Link& b) {
  return a.source != b.source ? a.source < b.source : a.target < b.target;
}

bool pair_equal(const Link& a, const Link& b) {
  return a.source == b.source && a.target == b.target;
}

struct LinkLine {
  std::string source;
  std::string target;
};

std::vector<LinkLine> read_link_lines(std::istream& in, const std::string& origin) {
  std::vector<LinkLine> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(origin, line_no, "expected source<TAB>target");
    // Trailing provenance columns (pseudo mapping files) are ignored.
    const auto end = line.find('\t', tab + 1);
    LinkLine l{line.substr(0, tab), line.substr(tab + 1, end == std::string::npos
                                                           ? std::string::npos
                                                           : end - tab - 1)};
    if (l.source.empty() || l.target.empty()) throw ParseError(origin, line_no, "empty field");
    result.push_back(std::move(l));
  }
  return result;
}

}  // namespace

MappingSet::MappingSet(MappingKind kind, std::vector<Link> links)
    : kind_(kind), links_(std::move(links)) {
  std::stable_sort(links_.begin(), links_.end(), pair_less);
  links_.erase(std::unique(links_.begin(), links_.end(), pair_equal), links_.end());
}

bool MappingSet::insert(const Link& link) {
  auto it = std::lower_bound(links_.begin(), links_.end(), link, pair_less);
  if (it != links_.end() && pair_equal(*it, link)) return false;
  links_.insert(it, link);
  return true;
}

bool MappingSet::erase(EntityId source, EntityId target) {
  const Link key{source, target};
  auto it = std::lower_bound(links_.begin(), links_.end(), key, pair_less);
  if (it == links_.end() || !pair_equal(*it, key)) return false;
  links_.erase(it);
  return true;
}

bool MappingSet::contains(EntityId source, EntityId target) const {
  return std::binary_search(links_.begin(), links_.end(), Link{source, target}, pair_less);
}

MappingSet MappingSet::flipped() const {
  std::vector<Link> out;
  out.reserve(links_.size());
  for (const auto& l : links_) out.push_back(Link{l.target, l.source, l.score});
  return MappingSet(kind_, std::move(out));
}

void MappingSet::validate(const KgPair& pair) const {
  for (const auto& l : links_) {
    if (l.source >= pair.source().num_entities())
      throw std::out_of_range("mapping source id " + std::to_string(l.source) + " invalid");
    if (l.target >= pair.target().num_entities())
      throw std::out_of_range("mapping target id " + std::to_string(l.target) + " invalid");
  }
}

bool MappingSet::same_pairs(const MappingSet& other) const {
  return std::equal(links_.begin(), links_.end(), other.links_.begin(), other.links_.end(),
                    pair_equal);
}

MappingSet unite(const MappingSet& a, const MappingSet& b, MappingKind kind) {
  std::vector<Link> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return MappingSet(kind, std::move(all));
}

std::size_t intersection_size(const MappingSet& a, const MappingSet& b) {
  std::size_t n = 0;
  for (const auto& l : a)
    if (b.contains(l.source, l.target)) ++n;
  return n;
}

Partition partition_mappings(const MappingSet& links, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("partition ratio must lie in (0, 1)");
  if (links.size() < 2) throw std::invalid_argument("partition needs at least two links");
  const auto n_labelled =
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(links.size())));
  if (n_labelled == 0)
    throw std::invalid_argument("partition ratio yields no labelled pairs");
  if (n_labelled == links.size())
    throw std::invalid_argument("partition ratio leaves no test pairs");

  std::vector<Link> shuffled(links.begin(), links.end());
  Rng rng(seed);
  rng.shuffle(std::span<Link>(shuffled));

  Partition p;
  p.ratio = ratio;
  p.seed = seed;
  p.labelled = MappingSet(MappingKind::Labelled,
                          {shuffled.begin(), shuffled.begin() + static_cast<long>(n_labelled)});
  p.test = MappingSet(MappingKind::Labelled,
                      {shuffled.begin() + static_cast<long>(n_labelled), shuffled.end()});
  return p;
}

MappingSet read_links(std::istream& in, const KgPair& pair, MappingKind kind,
                      const std::string& origin) {
  std::vector<Link> links;
  std::size_t line_no = 0;
  for (const auto& l : read_link_lines(in, origin)) {
    ++line_no;
    const auto s = pair.source().find_entity(l.source);
    const auto t = pair.target().find_entity(l.target);
    if (!s) throw ParseError(origin, line_no, "unknown source entity '" + l.source + "'");
    if (!t) throw ParseError(origin, line_no, "unknown target entity '" + l.target + "'");
    links.push_back(Link{*s, *t});
  }
  return MappingSet(kind, std::move(links));
}

MappingSet load_links(const std::filesystem::path& path, const KgPair& pair, MappingKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open links file " + path.string());
  return read_links(in, pair, kind, path.string());
}

void write_links(std::ostream& out, const MappingSet& links, const KgPair& pair) {
  for (const auto& l : links)
    out << pair.source().entity_label(l.source) << '\t' << pair.target().entity_label(l.target)
        << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
  KgBuilder source;
  KgBuilder target;
  read_triples(dir / "rel_triples_1", source);
  read_triples(dir / "rel_triples_2", target);

  const auto links_path = dir / "ent_links";
  std::ifstream in(links_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open links file " + links_path.string());
  std::vector<Link> links;
  for (const auto& l : read_link_lines(in, links_path.string()))
    links.push_back(Link{source.add_entity(l.source), target.add_entity(l.target)});
  if (links.empty()) throw std::runtime_error("links file " + links_path.string() + " is empty");

  Dataset d;
  d.pair = KgPair(std::make_shared<const Kg>(std::move(source).build()),
                  std::make_shared<const Kg>(std::move(target).build()));
  d.links = MappingSet(MappingKind::Labelled, std::move(links));
  return d;
}

}  // namespace stea
