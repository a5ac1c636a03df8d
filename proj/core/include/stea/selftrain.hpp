#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stea/compatibility.hpp"
#include "stea/config.hpp"
#include "stea/ea_model.hpp"
#include "stea/metrics.hpp"
#include "stea/normalizer.hpp"

namespace stea {

// Everything a run trains and evaluates on.
struct ExperimentData {
  KgPair pair;
  MappingSet links{MappingKind::Labelled};     // all ground truth
  MappingSet labelled{MappingKind::Labelled};  // M^l
  MappingSet test{MappingKind::Labelled};
  // Content fingerprints (FNV-1a) of the inputs, by name.
  std::map<std::string, std::uint64_t> fingerprints;
};

// Loads data_dir (or generates twin KGs) and applies the fixed split or the
// seeded partition.
ExperimentData prepare_data(const RunConfig& config);

std::unique_ptr<EaModel> make_model(const RunConfig& config, const ExperimentData& data);

struct IterationReport {
  std::size_t iteration = 0;
  EvalReport eval;
  PseudoQuality pseudo;
  std::size_t train_size = 0;
  double loss = 0.0;  // mean training loss over this iteration's epochs
  double seconds = 0.0;
  // Fitted calibration per direction (q*-based strategies only).
  std::optional<NormalizerParams> omega_forward;
  std::optional<NormalizerParams> omega_backward;
};

// Which scoring paths a run used.
struct RunStats {
  std::size_t qstar_derivations = 0;
  std::size_t similarity_strategy_calls = 0;
};

struct RunResult {
  std::vector<IterationReport> reports;
  MappingSet final_pseudo{MappingKind::Pseudo};
  RunStats stats;
};

// q* rows for one direction, with their calibration.
struct DirectionalQStar {
  NormalizerParams omega;
  std::vector<ProbRow> q;       // masked calibrated rows for the unlabelled entities
  std::vector<ProbRow> q_star;  // dependency-aware rows, same order
  std::vector<ConditionalRow> conditional;
};

// Steps 2-4 for one direction: fit the calibration on the labelled rows,
// mask labelled entities out, estimate relation statistics and derive q*.
// `sim` rows are entities of the direction's source KG.
DirectionalQStar derive_direction(const KgPair& pair, const MappingSet& labelled,
                                  const SimMatrix& sim, const RunConfig& config);

class SelfTrainer {
 public:
  // Called after each iteration with the report, the pseudo set of the
  // iteration and the training set the model was refit on.
  using Observer =
      std::function<void(const IterationReport&, const MappingSet&, const MappingSet&)>;

  SelfTrainer(RunConfig config, ExperimentData data, std::unique_ptr<EaModel> model);

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  // Dispatches on config.mode.
  RunResult run();
  RunResult run_supervised();
  RunResult run_selftrain();

  const ExperimentData& data() const noexcept { return data_; }
  const EaModel& model() const noexcept { return *model_; }
  const RunConfig& config() const noexcept { return config_; }
  // Forward q* rows of the latest q*-based iteration.
  const std::vector<ConditionalRow>& last_q_star() const noexcept { return last_q_star_; }

 private:
  MappingSet generate(const SimMatrix& forward, const SimMatrix& backward,
                      IterationReport& report, RunStats& stats);
  EvalReport evaluate_model(const SimMatrix& forward, RunStats& stats);
  double recent_loss(std::size_t epochs) const;

  RunConfig config_;
  ExperimentData data_;
  std::unique_ptr<EaModel> model_;
  Observer observer_;
  OneToOneAccumulator accumulator_;
  std::vector<ConditionalRow> last_q_star_;
};

// Builds data and model from the config, then runs.
RunResult run_supervised(const RunConfig& config);
RunResult run_selftrain(const RunConfig& config);

}  // namespace stea
