#ifndef MEGALIGN_FEATURES_HPP
#define MEGALIGN_FEATURES_HPP

#include "megalign/core_data.hpp"

#include <unordered_map>

namespace megalign {

struct FeatureBinding {
  std::string sentence_id;
  std::size_t position = 0;
  std::string token;

  StimulusKey key() const { return {sentence_id, position}; }
};

/// Word-in-context vectors for one (model, layer); row i belongs to bindings[i].
struct FeatureMatrix {
  std::string model_id;
  std::string layer_id;
  Matrix rows;
  std::vector<FeatureBinding> bindings;
  bool prefix_causal = true;

  Eigen::Index dim() const { return rows.cols(); }
  Eigen::Index size() const { return rows.rows(); }
  std::string name() const { return model_id + ":" + layer_id; }

  std::optional<Eigen::Index> find(const StimulusKey &k) const {
    for (std::size_t i = 0; i < bindings.size(); ++i)
      if (bindings[i].sentence_id == k.sentence_id && bindings[i].position == k.position)
        return static_cast<Eigen::Index>(i);
    return std::nullopt;
  }
};

inline void validate(const FeatureMatrix &fm) {
  if (fm.rows.rows() != static_cast<Eigen::Index>(fm.bindings.size()))
    throw DataError(fm.name() + ": " + std::to_string(fm.rows.rows()) + " rows but " +
                    std::to_string(fm.bindings.size()) + " bindings");
  if (!fm.rows.allFinite())
    throw DataError(fm.name() + ": non-finite entries");
  std::set<StimulusKey> seen;
  for (const auto &b : fm.bindings)
    if (!seen.insert(b.key()).second)
      throw DataError(fm.name() + ": stimulus " + to_string(b.key()) + " bound twice");
}

/// Every row must name an existing stimulus token with matching text.
inline void validate_bindings(const FeatureMatrix &fm, const std::vector<SentenceStimulus> &stimuli) {
  const StimulusIndex idx(stimuli);
  for (const auto &b : fm.bindings) {
    const auto *tok = idx.token(b.key());
    if (!tok)
      throw DataError(fm.name() + ": row bound to unknown stimulus " + to_string(b.key()));
    if (!b.token.empty() && tok->text != b.token)
      throw DataError(fm.name() + ": row " + to_string(b.key()) + " token '" + b.token + "' but stimulus has '" +
                      tok->text + "'");
  }
}

// ---------------------------------------------------------------------------
// Random baseline

enum class RandomMode {
  per_word_type, // one vector per distinct word, keyed on (seed, text)
  per_occurrence // a fresh vector per (sentence, position)
};

inline constexpr Eigen::Index kRandomDim = 300;

inline FeatureMatrix random_embedding(const std::vector<SentenceStimulus> &stimuli, std::uint64_t seed,
                                      RandomMode mode = RandomMode::per_word_type, Eigen::Index dim = kRandomDim) {
  FeatureMatrix fm;
  fm.model_id = mode == RandomMode::per_word_type ? "random" : "random_occurrence";
  fm.layer_id = "0";
  std::size_t n = 0;
  for (const auto &s : stimuli)
    n += s.tokens.size();
  fm.rows.resize(static_cast<Eigen::Index>(n), dim);
  Eigen::Index r = 0;
  for (const auto &s : stimuli) {
    for (const auto &t : s.tokens) {
      KeyedRng key(seed);
      key.with(t.text);
      if (mode == RandomMode::per_occurrence)
        key.with(s.sentence_id).with(static_cast<std::uint64_t>(t.position));
      auto gen = key.engine();
      for (Eigen::Index j = 0; j < dim; ++j)
        fm.rows(r, j) = uniform01(gen);
      fm.bindings.push_back({s.sentence_id, t.position, t.text});
      ++r;
    }
  }
  return fm;
}

// ---------------------------------------------------------------------------
// GloVe lexicon and the additive context model

enum class OovPolicy { reject, zero };

class GloveLexicon {
public:
  GloveLexicon() = default;

  void add(std::string word, const RowVector &v) {
    if (dim_ == 0)
      dim_ = v.size();
    if (v.size() != dim_)
      throw DataError("lexicon: vector for '" + word + "' has dimension " + std::to_string(v.size()) + ", expected " +
                      std::to_string(dim_));
    table_[std::move(word)] = v;
  }

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  bool contains(const std::string &w) const { return table_.count(w) != 0; }

  const RowVector *find(const std::string &w) const {
    auto it = table_.find(w);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> words() const {
    std::vector<std::string> w;
    for (const auto &[k, v] : table_)
      w.push_back(k);
    std::sort(w.begin(), w.end());
    return w;
  }

private:
  Eigen::Index dim_ = 0;
  std::unordered_map<std::string, RowVector> table_;
};

/// Whitespace text format: `word v1 ... vD` per line.
inline GloveLexicon parse_glove(std::istream &in) {
  GloveLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word))
      continue;
    std::vector<double> v;
    double x;
    while (ss >> x)
      v.push_back(x);
    if (!ss.eof())
      throw DataError("glove line " + std::to_string(lineno) + ": non-numeric component");
    if (v.empty())
      throw DataError("glove line " + std::to_string(lineno) + ": no vector for '" + word + "'");
    lex.add(word, Eigen::Map<const RowVector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return lex;
}

inline GloveLexicon load_glove(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open glove file " + path.string());
  return parse_glove(in);
}

inline void save_glove(const fs::path &path, const GloveLexicon &lex) {
  std::ostringstream out;
  out.precision(17);
  for (const auto &w : lex.words()) {
    out << w;
    const auto &v = *lex.find(w);
    for (Eigen::Index j = 0; j < v.size(); ++j)
      out << ' ' << v(j);
    out << '\n';
  }
  write_text_file(path, out.str());
}

/// Lexicon of standard-normal vectors keyed on (seed, word); stands in for GloVe in simulation.
inline GloveLexicon random_lexicon(const std::vector<std::string> &words, Eigen::Index dim, std::uint64_t seed) {
  GloveLexicon lex;
  for (const auto &w : words) {
    auto gen = KeyedRng(seed).with("lexicon").with(w).engine();
    lex.add(w, standard_normal(1, dim, gen).row(0));
  }
  return lex;
}

inline std::vector<std::string> vocabulary(const std::vector<SentenceStimulus> &stimuli) {
  std::set<std::string> v;
  for (const auto &s : stimuli)
    for (const auto &t : s.tokens)
      v.insert(t.text);
  return {v.begin(), v.end()};
}

namespace detail {
inline RowVector lookup(const GloveLexicon &lex, const std::string &w, OovPolicy oov) {
  if (const auto *v = lex.find(w))
    return *v;
  if (oov == OovPolicy::zero)
    return RowVector::Zero(lex.dim());
  throw DataError("out-of-vocabulary word '" + w + "'");
}

inline void check_oov(const GloveLexicon &lex, const std::vector<SentenceStimulus> &stimuli, OovPolicy oov) {
  if (oov != OovPolicy::reject)
    return;
  std::set<std::string> missing;
  for (const auto &s : stimuli)
    for (const auto &t : s.tokens)
      if (!lex.contains(t.text))
        missing.insert(t.text);
  if (!missing.empty()) {
    std::string list;
    for (const auto &m : missing)
      list += (list.empty() ? "" : ", ") + m;
    throw DataError("words missing from lexicon: " + list);
  }
}
} // namespace detail

/// c_1 = g(w_1); c_t = (g(w_t) + c_{t-1}) / 2.
inline std::vector<RowVector> glove_additive(const SentenceStimulus &sentence, const GloveLexicon &lex,
                                             OovPolicy oov = OovPolicy::reject) {
  detail::check_oov(lex, {sentence}, oov);
  std::vector<RowVector> ctx;
  ctx.reserve(sentence.tokens.size());
  for (const auto &t : sentence.tokens) {
    const RowVector g = detail::lookup(lex, t.text, oov);
    if (ctx.empty())
      ctx.push_back(g);
    else
      ctx.push_back((g + ctx.back()) / 2.0);
  }
  return ctx;
}

inline FeatureMatrix glove_additive_features(const std::vector<SentenceStimulus> &stimuli, const GloveLexicon &lex,
                                             OovPolicy oov = OovPolicy::reject) {
  detail::check_oov(lex, stimuli, oov);
  FeatureMatrix fm;
  fm.model_id = "glove_additive";
  fm.layer_id = "0";
  std::vector<RowVector> rows;
  for (const auto &s : stimuli) {
    auto ctx = glove_additive(s, lex, oov);
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      rows.push_back(std::move(ctx[i]));
      fm.bindings.push_back({s.sentence_id, i, s.tokens[i].text});
    }
  }
  fm.rows.resize(static_cast<Eigen::Index>(rows.size()), lex.dim());
  for (std::size_t i = 0; i < rows.size(); ++i)
    fm.rows.row(static_cast<Eigen::Index>(i)) = rows[i];
  return fm;
}

/// Non-contextual lexicon vectors for each word occurrence.
inline FeatureMatrix glove_word_features(const std::vector<SentenceStimulus> &stimuli, const GloveLexicon &lex,
                                         OovPolicy oov = OovPolicy::reject) {
  detail::check_oov(lex, stimuli, oov);
  FeatureMatrix fm;
  fm.model_id = "glove";
  fm.layer_id = "0";
  std::size_t n = 0;
  for (const auto &s : stimuli)
    n += s.tokens.size();
  fm.rows.resize(static_cast<Eigen::Index>(n), lex.dim());
  Eigen::Index r = 0;
  for (const auto &s : stimuli)
    for (const auto &t : s.tokens) {
      fm.rows.row(r++) = detail::lookup(lex, t.text, oov);
      fm.bindings.push_back({s.sentence_id, t.position, t.text});
    }
  return fm;
}

// ---------------------------------------------------------------------------
// Activation interchange: features.json manifest(s) + raw f32le payloads.

namespace detail {
inline FeatureMatrix feature_from_manifest(const json &j, const fs::path &base) {
  FeatureMatrix fm;
  try {
    fm.model_id = j.at("model_id").get<std::string>();
    fm.layer_id = j.at("layer_id").is_string() ? j.at("layer_id").get<std::string>()
                                               : std::to_string(j.at("layer_id").get<long>());
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto rows = j.at("rows").get<Eigen::Index>();
    if (j.value("dtype", std::string("f32le")) != "f32le")
      throw DataError(fm.name() + ": unsupported dtype " + j.at("dtype").get<std::string>());
    if (j.value("layout", std::string("row-major")) != "row-major")
      throw DataError(fm.name() + ": unsupported layout " + j.at("layout").get<std::string>());
    fm.prefix_causal = j.value("prefix_causal", false);
    for (const auto &b : j.at("bindings"))
      fm.bindings.push_back({b.at("sentence_id").get<std::string>(), b.at("position").get<std::size_t>(),
                             b.value("token", std::string())});
    if (static_cast<Eigen::Index>(fm.bindings.size()) != rows)
      throw DataError(fm.name() + ": manifest declares " + std::to_string(rows) + " rows but " +
                      std::to_string(fm.bindings.size()) + " bindings");
    try {
      fm.rows = read_f32le(base / j.at("data").get<std::string>(), rows, dim);
    } catch (const DataError &e) {
      throw DataError(fm.name() + ": " + e.what());
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed feature manifest: ") + e.what());
  }
  validate(fm);
  return fm;
}
} // namespace detail

/// Accepts a single manifest object, an array of them, or {"matrices": [...]}.
inline std::vector<FeatureMatrix> load_activations(const fs::path &manifest_path) {
  const json j = read_json_file(manifest_path);
  const auto base = manifest_path.parent_path();
  std::vector<FeatureMatrix> out;
  const json *list = &j;
  if (j.is_object() && j.contains("matrices"))
    list = &j.at("matrices");
  if (list->is_array()) {
    for (const auto &m : *list)
      out.push_back(detail::feature_from_manifest(m, base));
  } else {
    out.push_back(detail::feature_from_manifest(*list, base));
  }
  std::set<std::string> names;
  for (const auto &fm : out)
    if (!names.insert(fm.name()).second)
      throw DataError("feature manifest: duplicate matrix " + fm.name());
  return out;
}

inline std::vector<FeatureMatrix> load_activations(const fs::path &manifest_path,
                                                   const std::vector<SentenceStimulus> &stimuli) {
  auto out = load_activations(manifest_path);
  for (const auto &fm : out)
    validate_bindings(fm, stimuli);
  return out;
}

inline json feature_manifest(const FeatureMatrix &fm, const std::string &data_file) {
  json b = json::array();
  for (const auto &x : fm.bindings)
    b.push_back({{"sentence_id", x.sentence_id}, {"position", x.position}, {"token", x.token}});
  return {{"model_id", fm.model_id}, {"layer_id", fm.layer_id}, {"dim", fm.dim()},
          {"rows", fm.size()},       {"dtype", "f32le"},        {"layout", "row-major"},
          {"prefix_causal", fm.prefix_causal}, {"bindings", b}, {"data", data_file}};
}

/// Writes every matrix next to `manifest_path` and a manifest array describing them.
inline void save_activations(const fs::path &manifest_path, const std::vector<FeatureMatrix> &matrices,
                             const json &provenance = json()) {
  const auto base = manifest_path.parent_path();
  if (!base.empty())
    fs::create_directories(base);
  json arr = json::array();
  for (const auto &fm : matrices) {
    validate(fm);
    std::string file = fm.model_id + "_" + fm.layer_id + ".f32";
    for (auto &c : file)
      if (c == '/' || c == ':' || c == ' ')
        c = '_';
    write_f32le(base / file, fm.rows);
    arr.push_back(feature_manifest(fm, file));
  }
  if (provenance.is_null()) {
    write_json_file(manifest_path, arr.size() == 1 ? arr[0] : arr);
  } else {
    write_json_file(manifest_path, {{"matrices", arr}, {"provenance", provenance}});
  }
}

} // namespace megalign

#endif // MEGALIGN_FEATURES_HPP
