#include "stea/ea_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stea/parallel.hpp"
#include "stea/rng.hpp"

namespace stea {

void EaModel::check_fit_args(const MappingSet& train, std::size_t epochs) {
  if (train.empty()) throw std::invalid_argument("fit requires a non-empty training set");
  if (epochs == 0) throw std::invalid_argument("fit requires at least one epoch");
}

namespace {

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

void normalize(std::span<double> v) {
  const double n = norm(v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

// loss and per-role gradients of one sample; returns 0 and leaves the
// gradients untouched when the hinge is inactive.
struct SampleGrad {
  std::vector<double> pos;  // (h + r - t) / ||h + r - t||
  std::vector<double> neg;  // (h~ + r - t~) / ||h~ + r - t~||
};

double sample_loss(std::span<const double> h, std::span<const double> r, std::span<const double> t,
                   std::span<const double> hn, std::span<const double> tn, double margin,
                   SampleGrad& g) {
  const std::size_t dim = h.size();
  g.pos.resize(dim);
  g.neg.resize(dim);
  double dp = 0.0;
  double dn = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    g.pos[k] = h[k] + r[k] - t[k];
    g.neg[k] = hn[k] + r[k] - tn[k];
    dp += g.pos[k] * g.pos[k];
    dn += g.neg[k] * g.neg[k];
  }
  dp = std::sqrt(dp);
  dn = std::sqrt(dn);
  const double loss = margin + dp - dn;
  if (loss <= 0.0) return 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    g.pos[k] = dp > 0.0 ? g.pos[k] / dp : 0.0;
    g.neg[k] = dn > 0.0 ? g.neg[k] / dn : 0.0;
  }
  return loss;
}

}  // namespace

double margin_ranking_loss(std::span<const double> entities, std::span<const double> relations,
                           std::size_t dim, double margin, std::span<const MarginSample> samples,
                           std::span<double> grad_entities, std::span<double> grad_relations) {
  const bool want_grad = !grad_entities.empty();
  if (want_grad && (grad_entities.size() != entities.size() ||
                    grad_relations.size() != relations.size()))
    throw std::invalid_argument("margin_ranking_loss: gradient buffer size mismatch");
  SampleGrad g;
  double total = 0.0;
  auto vec = [dim](std::span<const double> table, std::uint32_t i) {
    return table.subspan(static_cast<std::size_t>(i) * dim, dim);
  };
  for (const auto& s : samples) {
    const double l = sample_loss(vec(entities, s.head), vec(relations, s.relation),
                                 vec(entities, s.tail), vec(entities, s.neg_head),
                                 vec(entities, s.neg_tail), margin, g);
    if (l <= 0.0) continue;
    total += l;
    if (!want_grad) continue;
    for (std::size_t k = 0; k < dim; ++k) {
      grad_entities[s.head * dim + k] += g.pos[k];
      grad_entities[s.tail * dim + k] -= g.pos[k];
      grad_relations[s.relation * dim + k] += g.pos[k] - g.neg[k];
      grad_entities[s.neg_head * dim + k] -= g.neg[k];
      grad_entities[s.neg_tail * dim + k] += g.neg[k];
    }
  }
  return total;
}

EmbeddingAligner::EmbeddingAligner(EmbeddingAlignerParams params) : params_(params) {
  if (params_.dim == 0) throw std::invalid_argument("embedding dim must be positive");
  if (!(params_.margin > 0.0)) throw std::invalid_argument("margin must be positive");
  if (params_.negatives == 0) throw std::invalid_argument("negatives must be positive");
  if (!(params_.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

std::uint32_t EmbeddingAligner::find(std::uint32_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void EmbeddingAligner::initialize(const KgPair& pair) {
  n_source_ = pair.source().num_entities();
  n_target_ = pair.target().num_entities();
  n_source_rel_ = pair.source().num_relations();
  n_target_rel_ = pair.target().num_relations();
  const std::size_t dim = params_.dim;
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  Rng rng(params_.seed ^ 0x9e3779b97f4a7c15ULL);
  entities_.resize((n_source_ + n_target_) * dim);
  relations_.resize((n_source_rel_ + n_target_rel_) * dim);
  for (double& x : entities_) x = rng.uniform(-bound, bound);
  for (double& x : relations_) x = rng.uniform(-bound, bound);
  for (std::size_t i = 0; i < n_source_ + n_target_; ++i)
    normalize(std::span<double>(entities_).subspan(i * dim, dim));
  for (std::size_t i = 0; i < n_source_rel_ + n_target_rel_; ++i)
    normalize(std::span<double>(relations_).subspan(i * dim, dim));
}

void EmbeddingAligner::fit(const KgPair& pair, const MappingSet& train, std::size_t epochs) {
  check_fit_args(train, epochs);
  train.validate(pair);
  const bool shape_changed = pair.source().num_entities() != n_source_ ||
                             pair.target().num_entities() != n_target_ ||
                             pair.source().num_relations() != n_source_rel_ ||
                             pair.target().num_relations() != n_target_rel_;
  if (!fitted_ || !params_.warm_start || shape_changed) initialize(pair);

  const std::size_t dim = params_.dim;
  const auto n_all = static_cast<std::uint32_t>(n_source_ + n_target_);
  auto vec = [&](std::uint32_t e) { return std::span<double>(entities_).subspan(e * dim, dim); };
  auto rel = [&](std::uint32_t r) { return std::span<double>(relations_).subspan(r * dim, dim); };

  parent_.resize(n_all);
  std::iota(parent_.begin(), parent_.end(), 0u);
  for (const auto& l : train) {
    const auto a = find(l.source);
    const auto b = find(static_cast<std::uint32_t>(n_source_ + l.target));
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  // A merged class starts from the normalized mean of its members.
  std::vector<double> sums(entities_.size(), 0.0);
  std::vector<std::uint32_t> class_size(n_all, 0);
  for (std::uint32_t e = 0; e < n_all; ++e) {
    const auto root = find(e);
    ++class_size[root];
    auto src = vec(e);
    for (std::size_t k = 0; k < dim; ++k) sums[root * dim + k] += src[k];
  }
  for (std::uint32_t e = 0; e < n_all; ++e) {
    if (find(e) != e || class_size[e] < 2) continue;
    auto dst = vec(e);
    std::copy_n(sums.begin() + static_cast<long>(e * dim), dim, dst.begin());
    normalize(dst);
  }

  struct GlobalTriple {
    std::uint32_t h, r, t;
    std::uint32_t offset, count;  // entity range of the owning KG
  };
  std::vector<GlobalTriple> triples;
  for (const auto& t : pair.source().triples())
    triples.push_back({t.head, t.relation, t.tail, 0u, static_cast<std::uint32_t>(n_source_)});
  for (const auto& t : pair.target().triples())
    triples.push_back({static_cast<std::uint32_t>(n_source_ + t.head),
                       static_cast<std::uint32_t>(n_source_rel_ + t.relation),
                       static_cast<std::uint32_t>(n_source_ + t.tail),
                       static_cast<std::uint32_t>(n_source_), static_cast<std::uint32_t>(n_target_)});

  Rng rng(params_.seed + 0x2545f4914f6cdd1dULL * (++fits_));
  std::vector<std::size_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0u);
  SampleGrad g;
  const double lr = params_.learning_rate;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t idx : order) {
      const auto& tr = triples[idx];
      for (std::size_t k = 0; k < params_.negatives; ++k) {
        const bool corrupt_head = rng.uniform_index(2) == 0;
        const auto random_entity =
            static_cast<std::uint32_t>(tr.offset + rng.uniform_index(tr.count));
        const std::uint32_t h = find(tr.h);
        const std::uint32_t t = find(tr.t);
        const std::uint32_t hn = corrupt_head ? find(random_entity) : h;
        const std::uint32_t tn = corrupt_head ? t : find(random_entity);
        const double l = sample_loss(vec(h), rel(tr.r), vec(t), vec(hn), vec(tn),
                                     params_.margin, g);
        ++count;
        if (l <= 0.0) continue;
        total += l;
        auto vh = vec(h), vt = vec(t), vr = rel(tr.r), vhn = vec(hn), vtn = vec(tn);
        for (std::size_t d = 0; d < dim; ++d) {
          vh[d] -= lr * g.pos[d];
          vt[d] += lr * g.pos[d];
          vr[d] -= lr * (g.pos[d] - g.neg[d]);
          vhn[d] += lr * g.neg[d];
          vtn[d] -= lr * g.neg[d];
        }
        normalize(vh);
        normalize(vt);
        normalize(vhn);
        normalize(vtn);
      }
    }
    const double mean = count ? total / static_cast<double>(count) : 0.0;
    if (!std::isfinite(mean))
      throw NumericalError("embedding training diverged at epoch " + std::to_string(epoch));
    loss_trace_.push_back(mean);
  }

  for (std::uint32_t e = 0; e < n_all; ++e) {
    const auto root = find(e);
    if (root != e) std::copy_n(vec(root).begin(), dim, vec(e).begin());
  }
  fitted_ = true;
}

std::span<const double> EmbeddingAligner::source_vector(EntityId e) const {
  if (e >= n_source_) throw std::out_of_range("source entity out of range");
  return std::span<const double>(entities_).subspan(e * params_.dim, params_.dim);
}

std::span<const double> EmbeddingAligner::target_vector(EntityId e) const {
  if (e >= n_target_) throw std::out_of_range("target entity out of range");
  return std::span<const double>(entities_).subspan((n_source_ + e) * params_.dim, params_.dim);
}

SimMatrix EmbeddingAligner::similarities(Direction direction) const {
  if (!fitted_) throw std::logic_error("similarities() called before fit()");
  const bool forward = direction == Direction::SourceToTarget;
  const std::size_t rows = forward ? n_source_ : n_target_;
  const std::size_t cols = forward ? n_target_ : n_source_;
  auto row_vec = [&](std::size_t i) { return forward ? source_vector(i) : target_vector(i); };
  auto col_vec = [&](std::size_t j) { return forward ? target_vector(j) : source_vector(j); };

  std::vector<double> col_norm(cols);
  for (std::size_t j = 0; j < cols; ++j) col_norm[j] = norm(col_vec(j));
  std::vector<double> values(rows * cols, 0.0);
  parallel_for(rows, params_.threads, [&](std::size_t i) {
    const auto a = row_vec(i);
    const double na = norm(a);
    for (std::size_t j = 0; j < cols; ++j) {
      const auto b = col_vec(j);
      const double denom = na * col_norm[j];
      const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
      values[i * cols + j] = denom > 0.0 ? std::clamp(dot / denom, -1.0, 1.0) : 0.0;
    }
  });
  return SimMatrix::dense(direction, rows, cols, std::move(values));
}

SyntheticOracle::SyntheticOracle(const MappingSet& truth, std::size_t n_source,
                                 std::size_t n_target, double noise_rate, std::uint64_t seed) {
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0))
    throw std::invalid_argument("noise rate must lie in [0, 1]");
  if (n_target < 2) throw std::invalid_argument("oracle needs at least two target entities");
  std::vector<EntityId> counterpart(n_source, kNoEntity);
  std::vector<EntityId> truth_rows;
  for (const auto& l : truth) {
    if (l.source >= n_source || l.target >= n_target)
      throw std::out_of_range("oracle truth id out of range");
    if (counterpart[l.source] != kNoEntity) continue;
    counterpart[l.source] = l.target;
    truth_rows.push_back(l.source);
  }
  Rng rng(seed);
  rng.shuffle(std::span<EntityId>(truth_rows));
  const auto n_noised = static_cast<std::size_t>(
      std::llround(noise_rate * static_cast<double>(truth_rows.size())));
  noised_.assign(truth_rows.begin(), truth_rows.begin() + static_cast<long>(n_noised));
  std::sort(noised_.begin(), noised_.end());

  std::vector<double> values(n_source * n_target);
  for (std::size_t i = 0; i < n_source; ++i) {
    double* row = values.data() + i * n_target;
    for (std::size_t j = 0; j < n_target; ++j) row[j] = rng.uniform(0.0, 0.5);
    const EntityId truth_col = counterpart[i];
    if (truth_col == kNoEntity) continue;
    EntityId peak = truth_col;
    if (std::binary_search(noised_.begin(), noised_.end(), static_cast<EntityId>(i))) {
      peak = static_cast<EntityId>(rng.uniform_index(n_target - 1));
      if (peak >= truth_col) ++peak;
    }
    row[peak] = rng.uniform(0.8, 1.0);
  }
  matrix_ = SimMatrix::dense(Direction::SourceToTarget, n_source, n_target, std::move(values));
}

void SyntheticOracle::fit(const KgPair&, const MappingSet& train, std::size_t epochs) {
  check_fit_args(train, epochs);
}

SimMatrix SyntheticOracle::similarities(Direction direction) const {
  return direction == Direction::SourceToTarget ? matrix_ : matrix_.transposed();
}

std::unique_ptr<EaModel> synthetic_oracle(const MappingSet& truth, std::size_t n_source,
                                          std::size_t n_target, double noise_rate,
                                          std::uint64_t seed) {
  return std::make_unique<SyntheticOracle>(truth, n_source, n_target, noise_rate, seed);
}

ImportedSimilarity::ImportedSimilarity(SimMatrix forward, std::optional<SimMatrix> backward)
    : forward_(std::move(forward)), backward_(std::move(backward)) {
  if (forward_.direction() != Direction::SourceToTarget)
    throw std::invalid_argument("imported forward matrix must be source->target");
  if (backward_) {
    if (backward_->direction() != Direction::TargetToSource)
      throw std::invalid_argument("imported backward matrix must be target->source");
    if (backward_->rows() != forward_.cols() || backward_->cols() != forward_.rows())
      throw std::invalid_argument("imported matrices have inconsistent shapes");
  } else if (forward_.is_sparse()) {
    throw std::invalid_argument("a sparse imported matrix needs an explicit reverse matrix");
  }
}

void ImportedSimilarity::fit(const KgPair& pair, const MappingSet& train, std::size_t epochs) {
  check_fit_args(train, epochs);
  if (forward_.rows() != pair.source().num_entities() ||
      forward_.cols() != pair.target().num_entities())
    throw std::invalid_argument("imported similarity shape does not match the KG pair");
}

SimMatrix ImportedSimilarity::similarities(Direction direction) const {
  if (direction == Direction::SourceToTarget) return forward_;
  return backward_ ? *backward_ : forward_.transposed();
}

}  // namespace stea
