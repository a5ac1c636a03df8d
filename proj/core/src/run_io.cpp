#include "stea/run_io.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <map>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace stea {

namespace {

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string num(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

}  // namespace

std::string hash8(std::uint64_t hash) { return hex64(hash).substr(8); }

std::string timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

std::filesystem::path create_run_directory(const std::filesystem::path& root,
                                           std::uint64_t config_hash,
                                           const std::string& timestamp) {
  std::filesystem::create_directories(root);
  const std::string base = timestamp + "-" + hash8(config_hash);
  for (int n = 1; n < 10000; ++n) {
    auto dir = root / (n == 1 ? base : base + "-" + std::to_string(n));
    // create_directory reports false when the directory already exists.
    if (std::filesystem::create_directory(dir)) return dir;
  }
  throw std::runtime_error("cannot create a fresh run directory under " + root.string());
}

void write_manifest(std::ostream& out, const RunConfig& config, const ExperimentData& data,
                    std::span<const IterationReport> reports) {
  std::map<std::string, std::string> entries;
  for (const auto& [k, v] : config.to_map()) entries["config." + k] = v;
  entries["config_hash"] = hex64(config.hash());
  for (const auto& [k, v] : data.fingerprints) entries["input." + k] = hex64(v);
  entries["data.source_entities"] = std::to_string(data.pair.source().num_entities());
  entries["data.target_entities"] = std::to_string(data.pair.target().num_entities());
  entries["data.links"] = std::to_string(data.links.size());
  entries["data.labelled"] = std::to_string(data.labelled.size());
  entries["data.test"] = std::to_string(data.test.size());
  entries["iterations_completed"] = std::to_string(reports.size());
  auto omega = [](const NormalizerParams& p) {
    return num(p.omega0) + " " + num(p.omega1) + " " + num(p.tau);
  };
  for (const auto& r : reports) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%04zu", r.iteration);
    if (r.omega_forward) entries[std::string("omega.") + idx + ".forward"] = omega(*r.omega_forward);
    if (r.omega_backward)
      entries[std::string("omega.") + idx + ".backward"] = omega(*r.omega_backward);
  }
  out << "# omega entries are omega0 omega1 tau\n";
  for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
}

void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const ExperimentData& data, std::span<const IterationReport> reports) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_manifest(out, config, data, reports);
}

std::string metrics_json_line(const IterationReport& r) {
  nlohmann::ordered_json j;
  j["iter"] = r.iteration;
  j["hit1"] = r.eval.hit1;
  j["hit10"] = r.eval.hit10;
  j["mrr"] = r.eval.mrr;
  j["pseudo_count"] = r.pseudo.count;
  j["pseudo_precision"] = r.pseudo.precision;
  j["pseudo_recall"] = r.pseudo.recall;
  j["loss"] = r.loss;
  j["seconds"] = r.seconds;
  return j.dump();
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) throw std::runtime_error("cannot open " + path.string());
}

void MetricsWriter::append(const IterationReport& report) {
  out_ << metrics_json_line(report) << '\n';
  out_.flush();
}

void write_pseudo_tsv(std::ostream& out, const MappingSet& pseudo, const KgPair& pair,
                      std::size_t iteration, Strategy strategy) {
  for (const auto& l : pseudo)
    out << pair.source().entity_label(l.source) << '\t' << pair.target().entity_label(l.target)
        << '\t' << iteration << '\t' << to_string(strategy) << '\t' << num(l.score) << '\n';
}

}  // namespace stea
