// stea: partition datasets, run supervised or self-training experiments,
// convert similarity files, print KG statistics and evaluate alignments.
//
// Exit codes: 0 success, 1 configuration or validation error, 2 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stea/compatibility.hpp"
#include "stea/config.hpp"
#include "stea/metrics.hpp"
#include "stea/run_io.hpp"
#include "stea/selftrain.hpp"
#include "stea/sim_io.hpp"

namespace fs = std::filesystem;
using namespace stea;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

// Raised for bad command-line input that is not a config-file problem.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset (or bare link file) whose labels resolve the link files.
struct LinkSource {
  KgPair pair;
  MappingSet links{MappingKind::Labelled};
};

LinkSource links_only(const fs::path& links_path) {
  std::ifstream in(links_path);
  if (!in) throw UsageError("cannot open " + links_path.string());
  KgBuilder source, target;
  std::string line;
  std::size_t number = 0;
  std::vector<std::pair<EntityId, EntityId>> pairs;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(links_path.string(), number, "expected source<TAB>target");
    const auto end = line.find('\t', tab + 1);
    pairs.emplace_back(source.add_entity(line.substr(0, tab)),
                       target.add_entity(line.substr(tab + 1, end - tab - 1)));
  }
  LinkSource ls;
  ls.pair = KgPair(std::make_shared<const Kg>(std::move(source).build()),
                   std::make_shared<const Kg>(std::move(target).build()));
  std::vector<Link> links;
  for (auto [s, t] : pairs) links.push_back({s, t, 0.0});
  ls.links = MappingSet(MappingKind::Labelled, std::move(links));
  return ls;
}

void write_links_file(const fs::path& path, const MappingSet& links, const KgPair& pair) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_links(out, links, pair);
}

int cmd_partition(const fs::path& data_dir, const fs::path& links_path, double ratio,
                  std::uint64_t seed, fs::path out_dir) {
  if (data_dir.empty() == links_path.empty())
    throw UsageError("give exactly one of --data-dir and --links");
  LinkSource src;
  if (!data_dir.empty()) {
    Dataset ds = load_dataset(data_dir);
    src.pair = ds.pair;
    src.links = std::move(ds.links);
  } else {
    src = links_only(links_path);
  }
  if (out_dir.empty()) out_dir = data_dir.empty() ? links_path.parent_path() : data_dir;
  if (out_dir.empty()) out_dir = ".";
  Partition p;
  try {
    p = partition_mappings(src.links, ratio, seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  fs::create_directories(out_dir);
  write_links_file(out_dir / "labelled.tsv", p.labelled, src.pair);
  write_links_file(out_dir / "test.tsv", p.test, src.pair);
  {
    std::ofstream m(out_dir / "partition.txt");
    m << "labelled = " << p.labelled.size() << "\nratio = " << ratio << "\nseed = " << seed
      << "\ntest = " << p.test.size() << '\n';
  }
  std::cout << "labelled " << p.labelled.size() << " test " << p.test.size() << " -> "
            << out_dir.string() << '\n';
  return kOk;
}

int cmd_run(const fs::path& config_path, const std::map<std::string, std::string>& overrides) {
  ConfigMap values;
  if (!config_path.empty()) values = load_config(config_path);
  for (const auto& [k, v] : overrides) values[k] = v;
  RunConfig config = RunConfig::from_map(values);
  config.validate(true);

  ExperimentData data = prepare_data(config);
  auto model = make_model(config, data);
  const fs::path dir = create_run_directory(config.output_dir, config.hash());
  write_manifest(dir / "manifest.txt", config, data, {});

  MetricsWriter metrics(dir / "metrics.jsonl");
  std::vector<IterationReport> reports;
  const KgPair pair = data.pair;
  const MappingSet labelled = data.labelled;
  SelfTrainer trainer(config, std::move(data), std::move(model));
  trainer.set_observer([&](const IterationReport& r, const MappingSet&, const MappingSet&) {
    metrics.append(r);
    reports.push_back(r);
    std::cerr << "iter " << r.iteration << " hit1 " << r.eval.hit1 << " pseudo "
              << r.pseudo.count << " precision " << r.pseudo.precision << '\n';
  });

  RunResult result;
  try {
    result = trainer.run();
  } catch (...) {
    write_manifest(dir / "manifest.txt", config, trainer.data(), reports);
    throw;
  }
  write_manifest(dir / "manifest.txt", config, trainer.data(), reports);
  {
    std::ofstream out(dir / "pseudo.tsv");
    write_pseudo_tsv(out, result.final_pseudo, pair, reports.empty() ? 0 : reports.back().iteration,
                     config.strategy.strategy);
  }
  write_links_file(dir / "labelled.tsv", labelled, pair);
  write_links_file(dir / "test.tsv", trainer.data().test, pair);
  if (config.dump_similarity)
    write_sim_matrix(dir / "similarity.txt",
                     trainer.model().similarities(Direction::SourceToTarget), pair,
                     SimFileFormat::Text);
  if (config.debug_dump && !trainer.last_q_star().empty()) {
    std::ofstream out(dir / "qstar_debug.tsv");
    write_q_star_debug(out, pair, trainer.last_q_star());
  }
  std::cout << dir.string() << '\n';
  return kOk;
}

int cmd_import_sim(const fs::path& data_dir, const fs::path& input, const fs::path& output,
                   const std::string& format) {
  Dataset ds = load_dataset(data_dir);
  const SimMatrix m = read_sim_matrix(input, ds.pair);
  write_sim_matrix(output, m, ds.pair, format == "binary" ? SimFileFormat::Binary : SimFileFormat::Text);
  std::cout << "rows " << m.rows() << " cols " << m.cols() << " layout "
            << (m.is_sparse() ? "topk" : "dense") << " -> " << output.string() << '\n';
  return kOk;
}

int cmd_stats(const fs::path& data_dir, const fs::path& labelled_path) {
  Dataset ds = load_dataset(data_dir);
  const MappingSet labelled =
      labelled_path.empty() ? ds.links : load_links(labelled_path, ds.pair);
  nlohmann::ordered_json j;
  for (int side = 0; side < 2; ++side) {
    const Kg& kg = side == 0 ? ds.pair.source() : ds.pair.target();
    auto& k = j[side == 0 ? "source" : "target"];
    k["entities"] = kg.num_entities();
    k["relations"] = kg.num_relations();
    k["triples"] = kg.triples().size();
    k["duplicates_dropped"] = kg.duplicates_dropped();
  }
  j["links"] = ds.links.size();
  j["assignment_links"] = labelled.size();
  const Assignment a = Assignment::from_labelled(ds.pair.source().num_entities(), labelled);
  const RelationStats stats = estimate_relation_stats(ds.pair, a);
  for (int side = 0; side < 2; ++side) {
    const Kg& kg = side == 0 ? ds.pair.source() : ds.pair.target();
    const Side s = side == 0 ? Side::Source : Side::Target;
    auto& rels = j[side == 0 ? "source_relations" : "target_relations"];
    for (RelationId r = 0; r < kg.num_relations(); ++r) {
      nlohmann::ordered_json e;
      e["relation"] = kg.relation_label(r);
      e["inv_fun"] = stats.inv_fun(s, forward_rel(r));
      e["inv_fun_inverse"] = stats.inv_fun(s, inverse_rel(r));
      rels.push_back(e);
    }
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_eval(const fs::path& data_dir, const fs::path& test_path, const fs::path& sim_path,
             const fs::path& pseudo_path) {
  Dataset ds = load_dataset(data_dir);
  const MappingSet test = test_path.empty() ? ds.links : load_links(test_path, ds.pair);
  nlohmann::ordered_json j;
  if (!sim_path.empty()) {
    const SimMatrix m = read_sim_matrix(sim_path, ds.pair);
    const EvalReport r = evaluate_alignment(m, test);
    j["n"] = r.n;
    j["hit1"] = r.hit1;
    j["hit10"] = r.hit10;
    j["mrr"] = r.mrr;
  }
  if (!pseudo_path.empty()) {
    const MappingSet pseudo = load_links(pseudo_path, ds.pair, MappingKind::Pseudo);
    const PseudoQuality q = pseudo_quality(pseudo, test);
    j["pseudo_count"] = q.count;
    j["pseudo_precision"] = q.precision;
    j["pseudo_recall"] = q.recall;
    j["pseudo_empty"] = q.empty;
  }
  if (j.empty()) throw UsageError("eval needs --sim and/or --pseudo");
  std::cout << j.dump() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency-aware self-training for entity alignment"};
  app.require_subcommand(1);

  auto* partition = app.add_subcommand("partition", "Split alignment links into labelled/test");
  fs::path p_data, p_links, p_out;
  double p_ratio = 0.3;
  std::uint64_t p_seed = 1;
  partition->add_option("--data-dir", p_data, "Dataset directory (uses ent_links)");
  partition->add_option("--links", p_links, "Links TSV");
  partition->add_option("--ratio", p_ratio, "Labelled fraction")->required();
  partition->add_option("--seed", p_seed, "Shuffle seed");
  partition->add_option("--out-dir", p_out, "Where labelled.tsv and test.tsv go");

  auto* run = app.add_subcommand("run", "Run a supervised or self-training experiment");
  fs::path r_config;
  run->add_option("--config", r_config, "Config file (key = value)");
  std::map<std::string, std::string> overrides;
  std::map<std::string, std::string> raw;
  for (const auto& key : config_keys()) {
    std::string names = "--" + key;
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (dashed != key) names += ",--" + dashed;
    run->add_option(names, raw[key], "Overrides config key " + key);
  }

  auto* import = app.add_subcommand("import-sim", "Validate and convert a similarity file");
  fs::path i_data, i_in, i_out;
  std::string i_format = "binary";
  import->add_option("--data-dir", i_data, "Dataset directory")->required();
  import->add_option("--input", i_in, "Similarity file (text or binary)")->required();
  import->add_option("--output", i_out, "Output file")->required();
  import->add_option("--format", i_format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}));

  auto* stats = app.add_subcommand("stats", "KG and relation statistics");
  fs::path s_data, s_labelled;
  stats->add_option("--data-dir", s_data, "Dataset directory")->required();
  stats->add_option("--labelled", s_labelled, "Links used for the assignment (default: all)");

  auto* eval = app.add_subcommand("eval", "Evaluate a similarity file or pseudo mappings");
  fs::path e_data, e_test, e_sim, e_pseudo;
  eval->add_option("--data-dir", e_data, "Dataset directory")->required();
  eval->add_option("--test", e_test, "Test links (default: all links)");
  eval->add_option("--sim", e_sim, "Similarity file");
  eval->add_option("--pseudo", e_pseudo, "Pseudo mapping TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*partition) return cmd_partition(p_data, p_links, p_ratio, p_seed, p_out);
    if (*run) {
      for (const auto& key : config_keys())
        if (run->count("--" + key) > 0) overrides[key] = raw[key];
      return cmd_run(r_config, overrides);
    }
    if (*import) return cmd_import_sim(i_data, i_in, i_out, i_format);
    if (*stats) return cmd_stats(s_data, s_labelled);
    if (*eval) return cmd_eval(e_data, e_test, e_sim, e_pseudo);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
