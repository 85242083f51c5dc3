#ifndef MEGALIGN_CONFIG_HPP
#define MEGALIGN_CONFIG_HPP

// Run configuration: a flat `key = value` text file. Lines starting with '#' are comments.
// Relative paths resolve against the directory holding the config file.

#include "megalign/ridge.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace megalign {

class ConfigError : public UsageError {
public:
  using UsageError::UsageError;
};

struct RunConfig {
  fs::path base_dir = ".";

  // paths
  fs::path epochs, responses, atlas, stimuli, features, glove, out = "out";
  fs::path model, generated, generated_features, synthetic;
  fs::path triples, verb_allowlist, entity_allowlist, tagged;

  // features
  std::string feature_model = "manifest"; // manifest | glove_additive | glove | random | random_occurrence
  std::string layer;                      // layer id selected from a multi-layer manifest
  std::string glove_oov = "reject";
  std::uint64_t random_seed = 7;

  // preprocessing
  double window_ms = 100.0;
  std::string repetition = "average"; // average | first | all

  // regression and evaluation
  std::vector<double> lambdas{0.1, 1.0, 10.0, 100.0, 1000.0};
  std::string lambda_mode = "shared";
  int folds = 5;
  std::uint64_t fold_seed = 1;
  std::size_t n_perm = 0;
  std::uint64_t perm_seed = 2;
  std::vector<std::string> subsets{"all"};
  std::vector<std::string> regions{"all"};
  bool exclude_same_word = false;
  bool train_on_subset = false;
  std::size_t pair_cap = 0;
  std::uint64_t pair_seed = 3;

  // sensitivity
  std::string sensitivity = "noun";

  // augmentation
  std::string selector = "nouns";
  int augment_folds = 4;
  std::size_t augment_perm = 400;
  double synthetic_weight = 1.0;
  bool within_category = true;

  // corpus
  long frequency_threshold = 6;

  // simulation
  std::uint64_t sim_seed = 11;
  int sim_d_in = 50;
  int sim_sensors = 306;
  int sim_windows = 5;
  int sim_repetitions = 10;
  double sim_noise = 1.0;
  double sim_sample_rate = 500.0;
  std::string sim_features = "glove_additive"; // glove_additive | random | random_occurrence

  unsigned threads = 1;

  fs::path resolve(const fs::path &p) const { return p.empty() || p.is_absolute() ? p : base_dir / p; }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string &v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ','))
    if (auto t = trim(item); !t.empty())
      out.push_back(t);
  return out;
}

struct Field {
  std::string doc;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
  bool hashed = true;
};

[[noreturn]] inline void bad_value(const std::string &value, const std::string &expected) {
  throw ConfigError("expected " + expected + ", got '" + value + "'");
}

template <class T> T parse_number(const std::string &v, const std::string &expected) {
  T out{};
  std::istringstream in(v);
  in >> out;
  if (!in || !(in >> std::ws).eof())
    bad_value(v, expected);
  if constexpr (std::is_unsigned_v<T>)
    if (v.find('-') != std::string::npos)
      bad_value(v, expected);
  return out;
}

inline bool parse_bool(const std::string &v) {
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  bad_value(v, "true or false");
}

inline std::string show(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join(const std::vector<std::string> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? "," : "") + v[i];
  return out;
}

inline Field path_field(fs::path RunConfig::*m, std::string doc) {
  return {std::move(doc), [m](RunConfig &c, const std::string &v) { c.*m = v; },
          [m](const RunConfig &c) { return (c.*m).generic_string(); }};
}

inline Field string_field(std::string RunConfig::*m, std::string doc, std::vector<std::string> choices = {}) {
  return {std::move(doc),
          [m, choices](RunConfig &c, const std::string &v) {
            if (!choices.empty() && std::find(choices.begin(), choices.end(), v) == choices.end())
              throw ConfigError("expected one of " + join(choices) + ", got '" + v + "'");
            c.*m = v;
          },
          [m](const RunConfig &c) { return c.*m; }};
}

template <class T> Field number_field(T RunConfig::*m, std::string doc, std::string expected, T lo) {
  return {std::move(doc),
          [m, expected, lo](RunConfig &c, const std::string &v) {
            const T x = parse_number<T>(v, expected);
            if (!(x >= lo))
              throw ConfigError("expected " + expected + ", got '" + v + "'");
            c.*m = x;
          },
          [m](const RunConfig &c) {
            if constexpr (std::is_floating_point_v<T>)
              return show(c.*m);
            else
              return std::to_string(c.*m);
          }};
}

inline Field bool_field(bool RunConfig::*m, std::string doc) {
  return {std::move(doc), [m](RunConfig &c, const std::string &v) { c.*m = parse_bool(v); },
          [m](const RunConfig &c) { return std::string(c.*m ? "true" : "false"); }};
}

inline const std::map<std::string, Field> &schema() {
  static const std::map<std::string, Field> s = [] {
    std::map<std::string, Field> f;
    f["epochs"] = path_field(&RunConfig::epochs, "epoch store directory");
    f["responses"] = path_field(&RunConfig::responses, "windowed response store directory");
    f["atlas"] = path_field(&RunConfig::atlas, "sensor region atlas CSV");
    f["stimuli"] = path_field(&RunConfig::stimuli, "stimulus JSON");
    f["features"] = path_field(&RunConfig::features, "feature interchange manifest");
    f["glove"] = path_field(&RunConfig::glove, "word vector text file");
    f["out"] = path_field(&RunConfig::out, "output directory");
    f["model"] = path_field(&RunConfig::model, "encoder model directory");
    f["generated"] = path_field(&RunConfig::generated, "generated-sentence stimulus JSON");
    f["generated_features"] = path_field(&RunConfig::generated_features, "encoder features for generated sentences");
    f["synthetic"] = path_field(&RunConfig::synthetic, "synthetic response store directory");
    f["triples"] = path_field(&RunConfig::triples, "SVO triple TSV");
    f["verb_allowlist"] = path_field(&RunConfig::verb_allowlist, "verb allowlist");
    f["entity_allowlist"] = path_field(&RunConfig::entity_allowlist, "entity allowlist");
    f["tagged"] = path_field(&RunConfig::tagged, "POS-tagged text, one sentence per line");
    f["feature_model"] = string_field(&RunConfig::feature_model, "feature source",
                                      {"manifest", "glove_additive", "glove", "random", "random_occurrence"});
    f["layer"] = string_field(&RunConfig::layer, "layer id within the feature manifest");
    f["glove_oov"] = string_field(&RunConfig::glove_oov, "out-of-vocabulary policy", {"reject", "zero"});
    f["random_seed"] = number_field<std::uint64_t>(&RunConfig::random_seed, "random embedding seed", "unsigned integer", 0);
    f["window_ms"] = number_field<double>(&RunConfig::window_ms, "window length in ms", "positive number", 1e-9);
    f["repetition"] = string_field(&RunConfig::repetition, "repetition policy", {"average", "first", "all"});
    f["lambdas"] = {"ridge grid",
                    [](RunConfig &c, const std::string &v) {
                      std::vector<double> g;
                      for (const auto &t : split_list(v))
                        g.push_back(parse_number<double>(t, "comma-separated numbers"));
                      try {
                        LambdaGrid check(g);
                      } catch (const UsageError &) {
                        throw ConfigError("expected positive, strictly increasing numbers, got '" + v + "'");
                      }
                      c.lambdas = g;
                    },
                    [](const RunConfig &c) {
                      std::vector<std::string> s;
                      for (double l : c.lambdas)
                        s.push_back(show(l));
                      return join(s);
                    }};
    f["lambda_mode"] = string_field(&RunConfig::lambda_mode, "shared or per_target", {"shared", "per_target"});
    f["folds"] = number_field<int>(&RunConfig::folds, "cross-validation folds", "integer >= 2", 2);
    f["fold_seed"] = number_field<std::uint64_t>(&RunConfig::fold_seed, "fold assignment seed", "unsigned integer", 0);
    f["n_perm"] = number_field<std::size_t>(&RunConfig::n_perm, "permutations for eval", "unsigned integer", 0);
    f["perm_seed"] = number_field<std::uint64_t>(&RunConfig::perm_seed, "permutation seed", "unsigned integer", 0);
    f["subsets"] = {"stimulus subsets", [](RunConfig &c, const std::string &v) { c.subsets = split_list(v); },
                    [](const RunConfig &c) { return join(c.subsets); }};
    f["regions"] = {"sensor regions", [](RunConfig &c, const std::string &v) { c.regions = split_list(v); },
                    [](const RunConfig &c) { return join(c.regions); }};
    f["exclude_same_word"] = bool_field(&RunConfig::exclude_same_word, "drop pairs of identical words");
    f["train_on_subset"] = bool_field(&RunConfig::train_on_subset, "fit regressions on the subset only");
    f["pair_cap"] = number_field<std::size_t>(&RunConfig::pair_cap, "max pairs per fold (0 = all)", "unsigned integer", 0);
    f["pair_seed"] = number_field<std::uint64_t>(&RunConfig::pair_seed, "pair sampling seed", "unsigned integer", 0);
    f["sensitivity"] = string_field(&RunConfig::sensitivity, "varied word class",
                                    {"noun", "verb", "det", "determiner", "adj", "adjective"});
    f["selector"] = string_field(&RunConfig::selector, "augmentation word class", {"nouns", "verbs"});
    f["augment_folds"] = number_field<int>(&RunConfig::augment_folds, "augmentation folds", "integer >= 2", 2);
    f["augment_perm"] = number_field<std::size_t>(&RunConfig::augment_perm, "augmentation permutations", "unsigned integer", 0);
    f["synthetic_weight"] = number_field<double>(&RunConfig::synthetic_weight, "row weight of synthetic samples",
                                                 "positive number", 1e-12);
    f["within_category"] = bool_field(&RunConfig::within_category, "restrict augmentation to the selected class");
    f["frequency_threshold"] = number_field<long>(&RunConfig::frequency_threshold, "triple frequency threshold",
                                                  "integer >= 0", 0);
    f["sim_seed"] = number_field<std::uint64_t>(&RunConfig::sim_seed, "simulation seed", "unsigned integer", 0);
    f["sim_d_in"] = number_field<int>(&RunConfig::sim_d_in, "simulated feature dimension", "integer >= 1", 1);
    f["sim_sensors"] = number_field<int>(&RunConfig::sim_sensors, "simulated sensors", "integer >= 1", 1);
    f["sim_windows"] = number_field<int>(&RunConfig::sim_windows, "simulated windows", "integer >= 1", 1);
    f["sim_repetitions"] = number_field<int>(&RunConfig::sim_repetitions, "simulated repetitions", "integer >= 1", 1);
    f["sim_noise"] = number_field<double>(&RunConfig::sim_noise, "simulated noise sigma", "number >= 0", 0.0);
    f["sim_sample_rate"] = number_field<double>(&RunConfig::sim_sample_rate, "simulated sample rate", "positive number",
                                                1e-9);
    f["sim_features"] = string_field(&RunConfig::sim_features, "simulated feature model",
                                     {"glove_additive", "random", "random_occurrence"});
    auto threads = number_field<unsigned>(&RunConfig::threads, "worker threads", "integer >= 1", 1u);
    threads.hashed = false;
    f["threads"] = threads;
    return f;
  }();
  return s;
}

} // namespace detail

/// Applies one `key=value` assignment; errors name the key.
inline void set_config_value(RunConfig &c, const std::string &key, const std::string &value) {
  const auto &s = detail::schema();
  auto it = s.find(key);
  if (it == s.end())
    throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second.set(c, value);
  } catch (const ConfigError &e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

inline RunConfig parse_config(std::istream &in, const fs::path &base_dir = ".") {
  RunConfig c;
  c.base_dir = base_dir;
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = detail::trim(t.substr(0, eq));
    const auto value = detail::trim(t.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      set_config_value(c, key, value);
    } catch (const ConfigError &e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

inline RunConfig load_config(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

/// Canonical text of every hashed field (defaults included), one `key=value` per line.
inline std::string canonical_config(const RunConfig &c) {
  std::string out;
  for (const auto &[k, f] : detail::schema())
    if (f.hashed)
      out += k + "=" + f.get(c) + "\n";
  return out;
}

inline std::string config_schema_text() {
  std::string out;
  RunConfig defaults;
  for (const auto &[k, f] : detail::schema())
    out += k + " (" + f.doc + ") default: " + f.get(defaults) + "\n";
  return out;
}

/// The resolved path of a required path field, or a diagnostic naming the field.
inline fs::path require_path(const RunConfig &c, const std::string &key, bool must_exist = true) {
  const auto &s = detail::schema();
  auto it = s.find(key);
  if (it == s.end())
    throw ConfigError("unknown config key '" + key + "'");
  const std::string raw = it->second.get(c);
  if (raw.empty())
    throw ConfigError("config field '" + key + "' is required for this command");
  const fs::path p = c.resolve(raw);
  if (must_exist && !fs::exists(p))
    throw ConfigError("config field '" + key + "': path does not exist: " + p.string());
  return p;
}

} // namespace megalign

#endif // MEGALIGN_CONFIG_HPP
