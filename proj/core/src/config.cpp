#include "stea/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include "stea/rng.hpp"

namespace stea {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("invalid value '" + value + "' for " + key + " (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    bad_value(key, v, "a number");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad_value(key, v, "a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto l = lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  bad_value(key, v, "true or false");
}

std::string fmt(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string fmt(bool b) { return b ? "true" : "false"; }

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  bool output_only = false;
};

template <typename T>
Field size_field(T RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& k, const std::string& v) {
            c.*m = static_cast<T>(to_u64(k, v));
          },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field double_field(double RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Field path_field(std::filesystem::path RunConfig::*m) {
  return {[m](RunConfig& c, const std::string&, const std::string& v) { c.*m = v; },
          [m](const RunConfig& c) { return (c.*m).generic_string(); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    f["data_dir"] = path_field(&RunConfig::data_dir);
    f["labelled"] = path_field(&RunConfig::labelled);
    f["test"] = path_field(&RunConfig::test);
    f["ratio"] = double_field(&RunConfig::ratio);
    f["seed"] = size_field(&RunConfig::seed);
    f["synth_entities"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.synthetic.entities = to_u64(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.synthetic.entities); }};
    f["synth_triples"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.synthetic.triples = to_u64(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.synthetic.triples); }};
    f["synth_relations"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.synthetic.relations = to_u64(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.synthetic.relations); }};
    f["synth_perturbation"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.synthetic.perturbation = to_double(k, v);
        },
        [](const RunConfig& c) { return fmt(c.synthetic.perturbation); }};
    f["synth_seed"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) {
          c.synthetic.seed = to_u64(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.synthetic.seed); }};

    f["model"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                    const auto l = lower(v);
                    if (l == "embedding") c.model = ModelKind::Embedding;
                    else if (l == "oracle") c.model = ModelKind::Oracle;
                    else if (l == "imported") c.model = ModelKind::Imported;
                    else bad_value(k, v, "embedding, oracle or imported");
                  },
                  [](const RunConfig& c) {
                    switch (c.model) {
                      case ModelKind::Embedding: return std::string("embedding");
                      case ModelKind::Oracle: return std::string("oracle");
                      case ModelKind::Imported: break;
                    }
                    return std::string("imported");
                  }};
    f["dim"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                  c.embedding.dim = to_u64(k, v);
                },
                [](const RunConfig& c) { return std::to_string(c.embedding.dim); }};
    f["margin"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                     c.embedding.margin = to_double(k, v);
                   },
                   [](const RunConfig& c) { return fmt(c.embedding.margin); }};
    f["negatives"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                        c.embedding.negatives = to_u64(k, v);
                      },
                      [](const RunConfig& c) { return std::to_string(c.embedding.negatives); }};
    f["lr"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                 c.embedding.learning_rate = to_double(k, v);
               },
               [](const RunConfig& c) { return fmt(c.embedding.learning_rate); }};
    f["warm_start"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                         c.embedding.warm_start = to_bool(k, v);
                       },
                       [](const RunConfig& c) { return fmt(c.embedding.warm_start); }};
    f["bootstrap_epochs"] = size_field(&RunConfig::bootstrap_epochs);
    f["epochs"] = size_field(&RunConfig::epochs);
    f["oracle_noise"] = double_field(&RunConfig::oracle_noise);
    f["sim_source"] = path_field(&RunConfig::sim_source);
    f["sim_target"] = path_field(&RunConfig::sim_target);

    f["mode"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                   const auto l = lower(v);
                   if (l == "supervised") c.mode = RunMode::Supervised;
                   else if (l == "selftrain") c.mode = RunMode::SelfTrain;
                   else bad_value(k, v, "supervised or selftrain");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.mode == RunMode::Supervised ? "supervised" : "selftrain");
                 }};
    f["strategy"] = {[](RunConfig& c, const std::string&, const std::string& v) {
                       c.strategy.strategy = parse_strategy(v);
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.strategy.strategy)); }};
    f["alpha"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                    if (v.empty()) c.strategy.alpha.reset();
                    else c.strategy.alpha = to_double(k, v);
                  },
                  [](const RunConfig& c) {
                    return c.strategy.alpha ? fmt(*c.strategy.alpha) : std::string();
                  }};
    f["theta"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                    if (v.empty()) c.strategy.theta.reset();
                    else c.strategy.theta = to_double(k, v);
                  },
                  [](const RunConfig& c) {
                    return c.strategy.theta ? fmt(*c.strategy.theta) : std::string();
                  }};
    f["uni_direction"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                            try {
                              c.strategy.uni_direction = parse_direction(v);
                            } catch (const std::exception&) {
                              bad_value(k, v, "source->target or target->source");
                            }
                          },
                          [](const RunConfig& c) {
                            return std::string(to_string(c.strategy.uni_direction));
                          }};
    f["topk"] = size_field(&RunConfig::top_k);
    f["iterations"] = size_field(&RunConfig::iterations);
    f["ca_sweeps"] = size_field(&RunConfig::ca_sweeps);
    f["stats_mode"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                         const auto l = lower(v);
                         if (l == "all") c.stats_mode = StatsMode::All;
                         else if (l == "labelled") c.stats_mode = StatsMode::Labelled;
                         else bad_value(k, v, "all or labelled");
                       },
                       [](const RunConfig& c) {
                         return std::string(c.stats_mode == StatsMode::All ? "all" : "labelled");
                       }};
    f["rank_by"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                      const auto l = lower(v);
                      if (l == "similarity") c.rank_by = RankBy::Similarity;
                      else if (l == "qstar") c.rank_by = RankBy::QStar;
                      else bad_value(k, v, "similarity or qstar");
                    },
                    [](const RunConfig& c) {
                      return std::string(c.rank_by == RankBy::Similarity ? "similarity" : "qstar");
                    }};
    f["norm_lr"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                      c.normalizer.learning_rate = to_double(k, v);
                    },
                    [](const RunConfig& c) { return fmt(c.normalizer.learning_rate); }};
    f["norm_epochs"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                          c.normalizer.epochs = to_u64(k, v);
                        },
                        [](const RunConfig& c) { return std::to_string(c.normalizer.epochs); }};

    f["threads"] = size_field(&RunConfig::threads);
    f["output_dir"] = path_field(&RunConfig::output_dir);
    f["output_dir"].output_only = true;
    f["record_seconds"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             c.record_seconds = to_bool(k, v);
                           },
                           [](const RunConfig& c) { return fmt(c.record_seconds); }};
    f["dump_similarity"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                              c.dump_similarity = to_bool(k, v);
                            },
                            [](const RunConfig& c) { return fmt(c.dump_similarity); }};
    f["debug_dump"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                         c.debug_dump = to_bool(k, v);
                       },
                       [](const RunConfig& c) { return fmt(c.debug_dump); }};
    return f;
  }();
  return table;
}

}  // namespace

ConfigMap parse_config(std::istream& in, const std::string& origin) {
  ConfigMap out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
    auto key = trim(std::string_view(text).substr(0, eq));
    auto value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
    if (!out.emplace(key, value).second)
      throw ConfigError(origin + ":" + std::to_string(number) + ": duplicate key " + key);
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig RunConfig::from_map(const ConfigMap& values) {
  RunConfig c;
  const auto& table = fields();
  for (const auto& [key, value] : values) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(c, key, value);
  }
  return c;
}

ConfigMap RunConfig::to_map() const {
  ConfigMap m;
  for (const auto& [key, f] : fields()) m[key] = f.get(*this);
  return m;
}

std::uint64_t RunConfig::hash() const {
  std::string text;
  for (const auto& [key, f] : fields()) {
    if (f.output_only) continue;
    text += key;
    text += '=';
    text += f.get(*this);
    text += '\n';
  }
  return fnv1a64(text);
}

void RunConfig::validate(bool check_files) const {
  if (top_k < 1) throw ConfigError("topk must be at least 1");
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (ca_sweeps < 1) throw ConfigError("ca_sweeps must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (labelled.empty() != test.empty())
    throw ConfigError("labelled and test must be given together");
  if (labelled.empty() && !(ratio > 0.0 && ratio < 1.0))
    throw ConfigError("ratio must lie in (0, 1)");
  if (labelled.empty() == false && data_dir.empty())
    throw ConfigError("labelled/test files need data_dir");
  if (data_dir.empty()) {
    if (synthetic.entities < 2) throw ConfigError("synth_entities must be at least 2");
    if (synthetic.relations < 1) throw ConfigError("synth_relations must be at least 1");
    if (synthetic.triples < 1) throw ConfigError("synth_triples must be at least 1");
    if (!(synthetic.perturbation >= 0.0 && synthetic.perturbation <= 1.0))
      throw ConfigError("synth_perturbation must lie in [0, 1]");
  }
  if (model == ModelKind::Embedding) {
    if (embedding.dim < 1) throw ConfigError("dim must be at least 1");
    if (embedding.negatives < 1) throw ConfigError("negatives must be at least 1");
    if (!(embedding.learning_rate > 0.0)) throw ConfigError("lr must be positive");
    if (!(embedding.margin > 0.0)) throw ConfigError("margin must be positive");
  }
  if (model == ModelKind::Oracle && !(oracle_noise >= 0.0 && oracle_noise <= 1.0))
    throw ConfigError("oracle_noise must lie in [0, 1]");
  if (model == ModelKind::Imported && sim_source.empty())
    throw ConfigError("model imported requires sim_source");
  if (!(normalizer.learning_rate > 0.0)) throw ConfigError("norm_lr must be positive");
  if (normalizer.epochs < 1) throw ConfigError("norm_epochs must be at least 1");
  if (mode == RunMode::SelfTrain) strategy.validate();

  if (!check_files) return;
  auto require = [](const std::filesystem::path& p, const char* key) {
    if (!p.empty() && !std::filesystem::exists(p))
      throw ConfigError(std::string(key) + " does not exist: " + p.string());
  };
  require(data_dir, "data_dir");
  if (!data_dir.empty())
    for (const char* name : {"rel_triples_1", "rel_triples_2", "ent_links"})
      require(data_dir / name, name);
  require(labelled, "labelled");
  require(test, "test");
  require(sim_source, "sim_source");
  require(sim_target, "sim_target");
}

}  // namespace stea
