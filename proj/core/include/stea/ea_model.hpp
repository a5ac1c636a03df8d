#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stea/kg.hpp"
#include "stea/mapping.hpp"
#include "stea/sim_matrix.hpp"

namespace stea {

// An entity-alignment model: trained on entity mappings, queried for
// similarities between the two KGs.
class EaModel {
 public:
  virtual ~EaModel() = default;

  // Throws std::invalid_argument for an empty training set or zero epochs.
  virtual void fit(const KgPair& pair, const MappingSet& train, std::size_t epochs) = 0;

  // |E| x |E'| for SourceToTarget, |E'| x |E| for TargetToSource.
  virtual SimMatrix similarities(Direction direction) const = 0;

  // Mean training loss per epoch, across all fits so far.
  virtual std::span<const double> loss_trace() const { return {}; }

  virtual std::string name() const = 0;

 protected:
  static void check_fit_args(const MappingSet& train, std::size_t epochs);
};

// Hyper-parameters of the translation-style reference aligner.
struct EmbeddingAlignerParams {
  std::size_t dim = 64;
  double margin = 1.0;
  std::size_t negatives = 5;
  double learning_rate = 0.01;
  // Keep parameters between fits; false re-initializes on every fit.
  bool warm_start = true;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// One positive triple and its corrupted counterpart, in global ids of a
// joint embedding table.
struct MarginSample {
  std::uint32_t head;
  std::uint32_t relation;
  std::uint32_t tail;
  std::uint32_t neg_head;
  std::uint32_t neg_tail;
};

// Sum over samples of max(0, margin + ||h + r - t|| - ||h~ + r - t~||).
// Gradients are accumulated (added) into the given spans when non-empty.
double margin_ranking_loss(std::span<const double> entities, std::span<const double> relations,
                           std::size_t dim, double margin, std::span<const MarginSample> samples,
                           std::span<double> grad_entities, std::span<double> grad_relations);

// TransE-style aligner over the union of both KGs. Entities linked by the
// training mappings share one vector (union-find); entity vectors are kept
// at unit length. Similarity is the cosine of entity vectors.
class EmbeddingAligner final : public EaModel {
 public:
  explicit EmbeddingAligner(EmbeddingAlignerParams params = {});

  void fit(const KgPair& pair, const MappingSet& train, std::size_t epochs) override;
  SimMatrix similarities(Direction direction) const override;
  std::span<const double> loss_trace() const override { return loss_trace_; }
  std::string name() const override { return "embedding"; }

  const EmbeddingAlignerParams& params() const noexcept { return params_; }
  bool fitted() const noexcept { return fitted_; }

  // Unit vector of a source (or target) entity.
  std::span<const double> source_vector(EntityId e) const;
  std::span<const double> target_vector(EntityId e) const;

 private:
  void initialize(const KgPair& pair);
  std::uint32_t find(std::uint32_t x);

  EmbeddingAlignerParams params_;
  bool fitted_ = false;
  std::size_t n_source_ = 0;
  std::size_t n_target_ = 0;
  std::size_t n_source_rel_ = 0;
  std::size_t n_target_rel_ = 0;
  std::vector<double> entities_;
  std::vector<double> relations_;
  std::vector<std::uint32_t> parent_;
  std::vector<double> loss_trace_;
  std::uint64_t fits_ = 0;
};

// Test double with a controlled error rate. For round((1 - noise) * n)
// truth rows the maximum sits on the true counterpart (score in [0.8, 1]);
// for the rest it sits on a random wrong column. All other scores are drawn
// in [0, 0.5]. The reverse direction is the transpose.
class SyntheticOracle final : public EaModel {
 public:
  SyntheticOracle(const MappingSet& truth, std::size_t n_source, std::size_t n_target,
                  double noise_rate, std::uint64_t seed);

  void fit(const KgPair& pair, const MappingSet& train, std::size_t epochs) override;
  SimMatrix similarities(Direction direction) const override;
  std::string name() const override { return "oracle"; }

  // Source entities whose row maximum is on a wrong counterpart.
  const std::vector<EntityId>& noised_rows() const noexcept { return noised_; }

 private:
  SimMatrix matrix_;
  std::vector<EntityId> noised_;
};

// Fixed similarities produced elsewhere (see sim_io.hpp). fit() only checks
// its arguments. Without a reverse matrix the forward one is transposed.
class ImportedSimilarity final : public EaModel {
 public:
  explicit ImportedSimilarity(SimMatrix forward, std::optional<SimMatrix> backward = {});

  void fit(const KgPair& pair, const MappingSet& train, std::size_t epochs) override;
  SimMatrix similarities(Direction direction) const override;
  std::string name() const override { return "imported"; }

 private:
  SimMatrix forward_;
  std::optional<SimMatrix> backward_;
};

std::unique_ptr<EaModel> synthetic_oracle(const MappingSet& truth, std::size_t n_source,
                                          std::size_t n_target, double noise_rate,
                                          std::uint64_t seed);

}  // namespace stea
