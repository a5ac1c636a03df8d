#include "stea/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stea {

EntityId ProbRow::argmax() const {
  if (probs.empty()) return kNoEntity;
  return candidates[static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) -
                                             probs.begin())];
}

double ProbRow::prob_of(EntityId candidate) const {
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i] == candidate) return probs[i];
  return 0.0;
}

namespace {

void check_params(const NormalizerParams& p) {
  if (!(p.tau > 0.0) || !std::isfinite(p.tau) || !std::isfinite(p.omega0) ||
      !std::isfinite(p.omega1))
    throw std::invalid_argument("normalizer parameters must be finite with tau > 0");
}

}  // namespace

ProbRow transform(EntityId source, std::span<const double> sims, const NormalizerParams& params) {
  check_params(params);
  if (sims.empty()) throw std::invalid_argument("transform: empty similarity row");
  ProbRow row;
  row.source = source;
  row.candidates.resize(sims.size());
  row.probs.resize(sims.size());
  double max_z = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sims.size(); ++j) {
    if (!std::isfinite(sims[j])) throw std::invalid_argument("transform: non-finite similarity");
    row.candidates[j] = static_cast<EntityId>(j);
    row.probs[j] = (params.omega1 * sims[j] + params.omega0) / params.tau;
    max_z = std::max(max_z, row.probs[j]);
  }
  double total = 0.0;
  for (double& p : row.probs) {
    p = std::exp(p - max_z);
    total += p;
  }
  for (double& p : row.probs) p /= total;
  return row;
}

ProbRow transform_top_k(EntityId source, std::span<const Scored> top, double fill,
                        std::size_t tail_count, const NormalizerParams& params) {
  check_params(params);
  if (top.empty() && tail_count == 0) throw std::invalid_argument("transform: empty row");
  ProbRow row;
  row.source = source;
  const double z_fill = (params.omega1 * fill + params.omega0) / params.tau;
  double max_z = tail_count > 0 ? z_fill : -std::numeric_limits<double>::infinity();
  for (const auto& s : top) {
    row.candidates.push_back(s.id);
    row.probs.push_back((params.omega1 * s.score + params.omega0) / params.tau);
    max_z = std::max(max_z, row.probs.back());
  }
  double total = 0.0;
  for (double& p : row.probs) {
    p = std::exp(p - max_z);
    total += p;
  }
  const double tail = static_cast<double>(tail_count) * std::exp(z_fill - max_z);
  total += tail_count > 0 ? tail : 0.0;
  for (double& p : row.probs) p /= total;
  row.tail_mass = tail_count > 0 ? tail / total : 0.0;
  return row;
}

ProbRow restrict_to(const ProbRow& row, std::span<const EntityId> keep) {
  ProbRow out;
  out.source = row.source;
  double total = 0.0;
  for (EntityId c : keep) {
    out.candidates.push_back(c);
    out.probs.push_back(row.prob_of(c));
    total += out.probs.back();
  }
  if (total > 0.0) {
    for (double& p : out.probs) p /= total;
  } else if (!out.probs.empty()) {
    for (double& p : out.probs) p = 1.0 / static_cast<double>(out.probs.size());
  }
  return out;
}

double normalizer_loss(std::span<const std::vector<double>> rows,
                       std::span<const std::size_t> truths, const NormalizerParams& params,
                       NormalizerGradient* grad) {
  check_params(params);
  if (rows.empty() || rows.size() != truths.size())
    throw std::invalid_argument("normalizer_loss: need one truth per non-empty row set");
  const double inv_tau = 1.0 / params.tau;
  double loss = 0.0;
  NormalizerGradient g;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& sims = rows[i];
    const std::size_t t = truths[i];
    if (t >= sims.size()) throw std::invalid_argument("truth index outside its row");
    double max_z = -std::numeric_limits<double>::infinity();
    for (double s : sims) max_z = std::max(max_z, (params.omega1 * s + params.omega0) * inv_tau);
    double total = 0.0;
    double weighted_s = 0.0;  // sum_j p_j * s_j (unnormalized)
    double weighted_z = 0.0;  // sum_j p_j * z_j (unnormalized)
    for (double s : sims) {
      const double z = (params.omega1 * s + params.omega0) * inv_tau;
      const double w = std::exp(z - max_z);
      total += w;
      weighted_s += w * s;
      weighted_z += w * z;
    }
    const double z_t = (params.omega1 * sims[t] + params.omega0) * inv_tau;
    loss += -(z_t - max_z - std::log(total));
    if (grad) {
      // dL/dz_j = p_j - [j == t]; dz/domega1 = s/tau, dz/dlog_tau = -z.
      // dz/domega0 = 1/tau for every j, so dL/domega0 = (sum p - 1)/tau = 0.
      g.omega1 += (weighted_s / total - sims[t]) * inv_tau;
      g.log_tau += -(weighted_z / total - z_t);
    }
  }
  const double n = static_cast<double>(rows.size());
  if (grad) *grad = NormalizerGradient{g.omega0 / n, g.omega1 / n, g.log_tau / n};
  return loss / n;
}

NormalizerFit fit_normalizer(std::span<const std::vector<double>> rows,
                             std::span<const std::size_t> truths, const NormalizerParams& init,
                             const NormalizerOptions& options) {
  if (rows.empty()) throw std::invalid_argument("fit_normalizer needs labelled rows");
  if (!(options.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  NormalizerFit fit;
  fit.params = init;
  NormalizerParams current = init;
  double log_tau = std::log(init.tau);
  NormalizerGradient grad;
  double loss = normalizer_loss(rows, truths, current, &grad);
  if (!std::isfinite(loss)) throw NumericalError("normalizer loss not finite at epoch 0");
  fit.loss_trace.push_back(loss);
  double best = loss;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    current.omega0 -= options.learning_rate * grad.omega0;
    current.omega1 -= options.learning_rate * grad.omega1;
    log_tau -= options.learning_rate * grad.log_tau;
    current.tau = std::exp(log_tau);
    if (!std::isfinite(current.omega1) || !std::isfinite(current.tau) || !(current.tau > 0.0))
      throw NumericalError("normalizer parameters diverged at epoch " + std::to_string(epoch));
    loss = normalizer_loss(rows, truths, current, &grad);
    if (!std::isfinite(loss))
      throw NumericalError("normalizer loss not finite at epoch " + std::to_string(epoch));
    fit.loss_trace.push_back(loss);
    if (loss < best) {
      best = loss;
      fit.params = current;
    }
  }
  return fit;
}

}  // namespace stea
