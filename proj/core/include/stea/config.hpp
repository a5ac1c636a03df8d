#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "stea/ea_model.hpp"
#include "stea/normalizer.hpp"
#include "stea/pseudo_gen.hpp"
#include "stea/synthetic.hpp"

namespace stea {

using ConfigMap = std::map<std::string, std::string>;

// "key = value" lines; '#' starts a comment. Duplicate keys and lines
// without '=' raise ConfigError naming the line.
ConfigMap parse_config(std::istream& in, const std::string& origin);
ConfigMap load_config(const std::filesystem::path& path);

enum class RunMode : std::uint8_t { Supervised, SelfTrain };
enum class ModelKind : std::uint8_t { Embedding, Oracle, Imported };
enum class StatsMode : std::uint8_t { All, Labelled };
enum class RankBy : std::uint8_t { Similarity, QStar };

struct RunConfig {
  // Data: a dataset directory, or generated twin KGs when data_dir is empty.
  std::filesystem::path data_dir;
  std::filesystem::path labelled;  // optional fixed split (with `test`)
  std::filesystem::path test;
  double ratio = 0.3;
  std::uint64_t seed = 1;
  TwinKgOptions synthetic;

  ModelKind model = ModelKind::Embedding;
  EmbeddingAlignerParams embedding;
  std::size_t bootstrap_epochs = 100;
  std::size_t epochs = 50;  // per iteration
  double oracle_noise = 0.3;
  std::filesystem::path sim_source;  // imported model
  std::filesystem::path sim_target;

  RunMode mode = RunMode::SelfTrain;
  StrategyConfig strategy;
  std::size_t top_k = 10;
  std::size_t iterations = 10;
  std::size_t ca_sweeps = 1;
  StatsMode stats_mode = StatsMode::All;
  RankBy rank_by = RankBy::Similarity;
  NormalizerOptions normalizer;

  unsigned threads = 1;
  std::filesystem::path output_dir = "runs";
  bool record_seconds = false;
  bool dump_similarity = false;
  bool debug_dump = false;

  // Unknown keys and malformed values raise ConfigError.
  static RunConfig from_map(const ConfigMap& values);
  // Every key with its resolved value.
  ConfigMap to_map() const;

  // Throws ConfigError. With check_files, referenced paths must exist.
  void validate(bool check_files = true) const;

  // FNV-1a over the resolved keys, excluding output-only settings.
  std::uint64_t hash() const;
};

// Names accepted by from_map, in sorted order.
const std::vector<std::string>& config_keys();

}  // namespace stea
