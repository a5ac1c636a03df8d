#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stea/sim_matrix.hpp"
#include "stea/types.hpp"

namespace stea {

// Calibration f = omega1 * sim + omega0 followed by softmax(f / tau).
struct NormalizerParams {
  double omega0 = 0.0;
  double omega1 = 1.0;
  double tau = 1.0;
};

// Candidate distribution q(y_e) for one row entity.
//
// `tail_mass` is the probability assigned to candidates left out of a
// top-K row (zero for full rows); probs plus tail_mass sum to one.
struct ProbRow {
  EntityId source = kNoEntity;
  std::vector<EntityId> candidates;
  std::vector<double> probs;
  double tail_mass = 0.0;

  // Candidate with the highest probability; exact ties go to the earlier
  // position (so to the lowest id when candidates are in id order).
  EntityId argmax() const;
  double prob_of(EntityId candidate) const;  // 0 when absent
};

// Full row: candidates are 0..sims.size()-1.
ProbRow transform(EntityId source, std::span<const double> sims, const NormalizerParams& params);

// Top-K approximation: the `tail_count` unlisted candidates all score `fill`.
ProbRow transform_top_k(EntityId source, std::span<const Scored> top, double fill,
                        std::size_t tail_count, const NormalizerParams& params);

// Keeps only the listed candidates (in the given order) and renormalizes.
ProbRow restrict_to(const ProbRow& row, std::span<const EntityId> keep);

struct NormalizerGradient {
  double omega0 = 0.0;
  double omega1 = 0.0;
  double log_tau = 0.0;
};

// Mean cross-entropy -1/|L| sum log Pr(y_e = truth_e) over the labelled rows;
// truths index into each row. When `grad` is non-null it receives the
// gradient with respect to (omega0, omega1, log tau).
double normalizer_loss(std::span<const std::vector<double>> rows,
                       std::span<const std::size_t> truths, const NormalizerParams& params,
                       NormalizerGradient* grad = nullptr);

struct NormalizerOptions {
  double learning_rate = 0.05;
  std::size_t epochs = 200;
};

struct NormalizerFit {
  NormalizerParams params;
  // loss_trace[0] is the loss at the initial parameters, then one entry per
  // gradient step.
  std::vector<double> loss_trace;
};

// Full-batch gradient descent on (omega0, omega1, log tau). Returns the
// iterate with the lowest loss seen. Throws NumericalError naming the epoch
// if the loss stops being finite, std::invalid_argument on bad inputs.
NormalizerFit fit_normalizer(std::span<const std::vector<double>> rows,
                             std::span<const std::size_t> truths, const NormalizerParams& init,
                             const NormalizerOptions& options = {});

}  // namespace stea
