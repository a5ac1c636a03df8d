#include "stea/selftrain.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "stea/rng.hpp"
#include "stea/sim_io.hpp"
#include "stea/synthetic.hpp"

namespace stea {

namespace {

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64(buf.str());
}

std::uint64_t kg_fingerprint(const Kg& kg) {
  std::ostringstream out;
  write_triples(out, kg);
  return fnv1a64(out.str());
}

}  // namespace

ExperimentData prepare_data(const RunConfig& config) {
  ExperimentData data;
  if (config.data_dir.empty()) {
    TwinKgs twins = make_twin_kgs(config.synthetic);
    data.pair = twins.pair;
    data.links = std::move(twins.links);
    data.fingerprints["synthetic_source"] = kg_fingerprint(data.pair.source());
    data.fingerprints["synthetic_target"] = kg_fingerprint(data.pair.target());
  } else {
    Dataset ds = load_dataset(config.data_dir);
    data.pair = ds.pair;
    data.links = std::move(ds.links);
    for (const char* name : {"rel_triples_1", "rel_triples_2", "ent_links"})
      data.fingerprints[name] = file_fingerprint(config.data_dir / name);
  }
  if (!config.labelled.empty()) {
    data.labelled = load_links(config.labelled, data.pair);
    data.test = load_links(config.test, data.pair);
    data.fingerprints["labelled"] = file_fingerprint(config.labelled);
    data.fingerprints["test"] = file_fingerprint(config.test);
  } else {
    Partition p = partition_mappings(data.links, config.ratio, config.seed);
    data.labelled = std::move(p.labelled);
    data.test = std::move(p.test);
  }
  return data;
}

std::unique_ptr<EaModel> make_model(const RunConfig& config, const ExperimentData& data) {
  switch (config.model) {
    case ModelKind::Embedding: {
      EmbeddingAlignerParams params = config.embedding;
      params.seed = derive_seed(config.seed, "embedding");
      params.threads = config.threads;
      return std::make_unique<EmbeddingAligner>(params);
    }
    case ModelKind::Oracle:
      return synthetic_oracle(data.links, data.pair.source().num_entities(),
                              data.pair.target().num_entities(), config.oracle_noise,
                              derive_seed(config.seed, "oracle"));
    case ModelKind::Imported: {
      SimMatrix forward = read_sim_matrix(config.sim_source, data.pair);
      std::optional<SimMatrix> backward;
      if (!config.sim_target.empty()) backward = read_sim_matrix(config.sim_target, data.pair);
      return std::make_unique<ImportedSimilarity>(std::move(forward), std::move(backward));
    }
  }
  throw ConfigError("unknown model");
}

DirectionalQStar derive_direction(const KgPair& pair, const MappingSet& labelled,
                                  const SimMatrix& sim, const RunConfig& config) {
  const std::size_t n_rows = pair.source().num_entities();
  const std::size_t n_cols = pair.target().num_entities();
  if (sim.rows() != n_rows || sim.cols() != n_cols)
    throw std::invalid_argument("similarity matrix does not match the KG pair");

  std::vector<bool> row_labelled(n_rows, false), col_labelled(n_cols, false);
  std::vector<std::vector<double>> fit_rows;
  std::vector<std::size_t> truths;
  for (const auto& l : labelled) {
    col_labelled.at(l.target) = true;
    if (row_labelled.at(l.source)) continue;
    row_labelled[l.source] = true;
    fit_rows.push_back(sim.dense_row(l.source));
    truths.push_back(l.target);
  }

  DirectionalQStar out;
  out.omega = fit_normalizer(fit_rows, truths, NormalizerParams{}, config.normalizer).params;

  std::vector<EntityId> open_cols;
  for (EntityId c = 0; c < n_cols; ++c)
    if (!col_labelled[c]) open_cols.push_back(c);
  if (open_cols.empty()) return out;

  for (EntityId u = 0; u < n_rows; ++u) {
    if (row_labelled[u]) continue;
    const auto values = sim.dense_row(u);
    out.q.push_back(restrict_to(transform(u, values, out.omega), open_cols));
  }

  const Assignment assignment = config.stats_mode == StatsMode::All
                                    ? make_assignment(n_rows, labelled, out.q)
                                    : Assignment::from_labelled(n_rows, labelled);
  const RelationStats stats = estimate_relation_stats(pair, assignment);
  QStarOptions options;
  options.top_k = config.top_k;
  options.sweeps = config.ca_sweeps;
  options.threads = config.threads;
  out.conditional = derive_q_star(pair, stats, labelled, out.q, options);
  out.q_star.reserve(out.conditional.size());
  for (const auto& row : out.conditional) out.q_star.push_back(row.to_prob_row());
  return out;
}

SelfTrainer::SelfTrainer(RunConfig config, ExperimentData data, std::unique_ptr<EaModel> model)
    : config_(std::move(config)), data_(std::move(data)), model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("SelfTrainer needs a model");
  config_.validate(false);
}

RunResult SelfTrainer::run() {
  return config_.mode == RunMode::Supervised ? run_supervised() : run_selftrain();
}

double SelfTrainer::recent_loss(std::size_t epochs) const {
  const auto trace = model_->loss_trace();
  if (trace.empty() || epochs == 0) return 0.0;
  const std::size_t n = std::min(epochs, trace.size());
  double sum = 0.0;
  for (std::size_t i = trace.size() - n; i < trace.size(); ++i) sum += trace[i];
  return sum / static_cast<double>(n);
}

EvalReport SelfTrainer::evaluate_model(const SimMatrix& forward, RunStats& stats) {
  if (config_.rank_by == RankBy::Similarity)
    return evaluate_alignment(forward, data_.test, config_.threads);
  // Ablation: q* candidates rank ahead of the rest, by q*; others by similarity.
  auto q = derive_direction(data_.pair, data_.labelled, forward, config_);
  ++stats.qstar_derivations;
  std::vector<double> values(forward.rows() * forward.cols());
  for (std::size_t r = 0; r < forward.rows(); ++r) {
    const auto row = forward.dense_row(r);
    std::copy(row.begin(), row.end(), values.begin() + static_cast<long>(r * forward.cols()));
  }
  for (const auto& row : q.q_star)
    for (std::size_t i = 0; i < row.candidates.size(); ++i)
      values[row.source * forward.cols() + row.candidates[i]] = 2.0 + row.probs[i];
  const auto ranked = SimMatrix::dense(Direction::SourceToTarget, forward.rows(),
                                       forward.cols(), std::move(values));
  return evaluate_alignment(ranked, data_.test, config_.threads);
}

MappingSet SelfTrainer::generate(const SimMatrix& forward, const SimMatrix& backward,
                                 IterationReport& report, RunStats& stats) {
  const StrategyConfig& s = config_.strategy;
  if (!uses_compatibility(s.strategy)) {
    ++stats.similarity_strategy_calls;
    const LabelMask mask(data_.labelled, data_.pair.source().num_entities(),
                         data_.pair.target().num_entities());
    switch (s.strategy) {
      case Strategy::SimThr: return sim_thr(forward, *s.theta, mask);
      case Strategy::OneToOne: return accumulator_.update(forward, *s.theta, mask);
      default: return mut_nearest(forward, backward, mask);
    }
  }

  // Both directions are derived for every q*-based strategy; UniThr then uses one.
  const DirectionalQStar fwd = derive_direction(data_.pair, data_.labelled, forward, config_);
  const DirectionalQStar bwd =
      derive_direction(data_.pair.swapped(), data_.labelled.flipped(), backward, config_);
  stats.qstar_derivations += 2;
  report.omega_forward = fwd.omega;
  report.omega_backward = bwd.omega;
  last_q_star_ = fwd.conditional;
  switch (s.strategy) {
    case Strategy::UniThr:
      return uni_thr(s.uni_direction == Direction::SourceToTarget ? fwd.q_star : bwd.q_star,
                     *s.alpha, s.uni_direction);
    case Strategy::BiThr: return bi_thr(fwd.q_star, bwd.q_star, *s.alpha);
    default: return mut_highest_prob(fwd.q_star, bwd.q_star);
  }
}

RunResult SelfTrainer::run_supervised() {
  using clock = std::chrono::steady_clock;
  RunResult result;
  model_->fit(data_.pair, data_.labelled, config_.bootstrap_epochs);
  const MappingSet no_pseudo(MappingKind::Pseudo);
  for (std::size_t t = 0; t < config_.iterations; ++t) {
    const auto start = clock::now();
    model_->fit(data_.pair, data_.labelled, config_.epochs);
    IterationReport report;
    report.iteration = t;
    report.eval = evaluate_model(model_->similarities(Direction::SourceToTarget), result.stats);
    report.pseudo = pseudo_quality(no_pseudo, data_.test);
    report.train_size = data_.labelled.size();
    report.loss = recent_loss(config_.epochs);
    if (config_.record_seconds)
      report.seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.reports.push_back(report);
    if (observer_) observer_(report, no_pseudo, data_.labelled);
  }
  return result;
}

RunResult SelfTrainer::run_selftrain() {
  using clock = std::chrono::steady_clock;
  RunResult result;
  accumulator_.reset();
  model_->fit(data_.pair, data_.labelled, config_.bootstrap_epochs);
  const bool need_backward = uses_compatibility(config_.strategy.strategy) ||
                             config_.strategy.strategy == Strategy::MutNearest;
  SimMatrix forward = model_->similarities(Direction::SourceToTarget);
  for (std::size_t t = 0; t < config_.iterations; ++t) {
    const auto start = clock::now();
    const SimMatrix backward =
        need_backward ? model_->similarities(Direction::TargetToSource) : SimMatrix{};
    IterationReport report;
    report.iteration = t;
    MappingSet pseudo = generate(forward, backward, report, result.stats);
    MappingSet train = unite(data_.labelled, pseudo, MappingKind::Labelled);
    model_->fit(data_.pair, train, config_.epochs);
    forward = model_->similarities(Direction::SourceToTarget);

    report.eval = evaluate_model(forward, result.stats);
    report.pseudo = pseudo_quality(pseudo, data_.test);
    report.train_size = train.size();
    report.loss = recent_loss(config_.epochs);
    if (config_.record_seconds)
      report.seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.reports.push_back(report);
    if (observer_) observer_(report, pseudo, train);
    result.final_pseudo = std::move(pseudo);
  }
  return result;
}

RunResult run_supervised(const RunConfig& config) {
  RunConfig c = config;
  c.mode = RunMode::Supervised;
  c.validate();
  ExperimentData data = prepare_data(c);
  auto model = make_model(c, data);
  return SelfTrainer(c, std::move(data), std::move(model)).run_supervised();
}

RunResult run_selftrain(const RunConfig& config) {
  RunConfig c = config;
  c.mode = RunMode::SelfTrain;
  c.validate();
  ExperimentData data = prepare_data(c);
  auto model = make_model(c, data);
  return SelfTrainer(c, std::move(data), std::move(model)).run_selftrain();
}

}  // namespace stea
