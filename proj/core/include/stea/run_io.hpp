#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>

#include "stea/config.hpp"
#include "stea/pseudo_gen.hpp"
#include "stea/selftrain.hpp"

namespace stea {

// Lower-case hex of the low 32 bits.
std::string hash8(std::uint64_t hash);

// Local time as YYYYMMDD-HHMMSS.
std::string timestamp_now();

// Creates root/<timestamp>-<hash8>; if that exists, appends -2, -3, ...
// Existing directories are never reused.
std::filesystem::path create_run_directory(const std::filesystem::path& root,
                                           std::uint64_t config_hash,
                                           const std::string& timestamp = timestamp_now());

// Sorted "key = value" lines: the resolved config, its hash, the input
// fingerprints and the fitted calibration of each reported iteration.
void write_manifest(std::ostream& out, const RunConfig& config, const ExperimentData& data,
                    std::span<const IterationReport> reports);
void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const ExperimentData& data, std::span<const IterationReport> reports);

// One JSON object with the fields iter, hit1, hit10, mrr, pseudo_count,
// pseudo_precision, pseudo_recall, loss, seconds.
std::string metrics_json_line(const IterationReport& report);

// Appends one line per report and flushes it immediately.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path);
  void append(const IterationReport& report);

 private:
  std::ofstream out_;
};

// Links TSV with provenance: source, target, iteration, strategy, score.
void write_pseudo_tsv(std::ostream& out, const MappingSet& pseudo, const KgPair& pair,
                      std::size_t iteration, Strategy strategy);

}  // namespace stea
