#ifndef MEGALIGN_CORE_DATA_HPP
#define MEGALIGN_CORE_DATA_HPP

#include "megalign/common.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace megalign {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Stimuli

enum class Voice { active, passive };
enum class DatasetId { PassAct2, Krns2, Krns5, generated, simulated };

inline std::string to_string(Voice v) { return v == Voice::active ? "active" : "passive"; }

inline Voice parse_voice(const std::string &s) {
  if (s == "active" || s == "A")
    return Voice::active;
  if (s == "passive" || s == "P")
    return Voice::passive;
  throw DataError("unknown voice '" + s + "'");
}

inline std::string to_string(DatasetId d) {
  switch (d) {
  case DatasetId::PassAct2: return "PassAct2";
  case DatasetId::Krns2: return "Krns2";
  case DatasetId::Krns5: return "Krns5";
  case DatasetId::generated: return "generated";
  case DatasetId::simulated: return "simulated";
  }
  return "simulated";
}

inline DatasetId parse_dataset(const std::string &s) {
  for (auto d : {DatasetId::PassAct2, DatasetId::Krns2, DatasetId::Krns5, DatasetId::generated,
                 DatasetId::simulated})
    if (to_string(d) == s)
      return d;
  throw DataError("unknown dataset_id '" + s + "'");
}

struct WordToken {
  std::string text;
  std::string pos;
  std::string sentence_id;
  std::size_t position = 0;
};

struct SentenceStimulus {
  std::string sentence_id;
  std::vector<WordToken> tokens;
  Voice voice = Voice::active;
  DatasetId dataset_id = DatasetId::simulated;

  std::size_t size() const { return tokens.size(); }
  std::string text() const {
    std::string s;
    for (const auto &t : tokens) {
      if (!s.empty())
        s += ' ';
      s += t.text;
    }
    return s;
  }
};

/// Identifies one word stimulus: a token position inside a sentence.
struct StimulusKey {
  std::string sentence_id;
  std::size_t position = 0;

  auto operator<=>(const StimulusKey &) const = default;
};

inline std::string to_string(const StimulusKey &k) {
  return k.sentence_id + "#" + std::to_string(k.position);
}

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Penn Treebank tag classes used by subsets and pattern rules.
inline bool is_noun_tag(const std::string &pos) { return pos.rfind("NN", 0) == 0; }
inline bool is_determiner_tag(const std::string &pos) { return pos == "DT"; }
inline bool is_adjective_tag(const std::string &pos) { return pos.rfind("JJ", 0) == 0; }

inline bool is_auxiliary(const std::string &text) {
  static const std::set<std::string> aux{"was", "were", "is", "are", "be", "been", "being", "am"};
  return aux.count(text) != 0;
}

/// Main verbs: VB* tags, excluding forms of "be".
inline bool is_main_verb(const WordToken &t) { return t.pos.rfind("VB", 0) == 0 && !is_auxiliary(t.text); }

/// Builds a stimulus from whitespace-separated tokens, optionally tagged as word/TAG.
inline SentenceStimulus make_sentence(std::string id, std::string_view tagged_text, Voice voice,
                                      DatasetId dataset = DatasetId::simulated) {
  SentenceStimulus s;
  s.sentence_id = std::move(id);
  s.voice = voice;
  s.dataset_id = dataset;
  std::istringstream in{std::string(tagged_text)};
  std::string tok;
  while (in >> tok) {
    WordToken w;
    const auto slash = tok.rfind('/');
    if (slash != std::string::npos && slash > 0) {
      w.text = lowercase(tok.substr(0, slash));
      w.pos = tok.substr(slash + 1);
    } else {
      w.text = lowercase(tok);
    }
    w.sentence_id = s.sentence_id;
    w.position = s.tokens.size();
    s.tokens.push_back(std::move(w));
  }
  if (s.tokens.empty())
    throw DataError("sentence " + s.sentence_id + " has no tokens");
  return s;
}

inline void validate(const SentenceStimulus &s) {
  if (s.sentence_id.empty())
    throw DataError("stimulus with empty sentence_id");
  if (s.tokens.empty())
    throw DataError("sentence " + s.sentence_id + " has no tokens");
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const auto &t = s.tokens[i];
    if (t.text.empty())
      throw DataError("sentence " + s.sentence_id + " token " + std::to_string(i) + " is empty");
    if (t.position != i || t.sentence_id != s.sentence_id)
      throw DataError("sentence " + s.sentence_id + " token " + std::to_string(i) + " has inconsistent binding");
  }
}

inline json stimuli_to_json(const std::vector<SentenceStimulus> &stimuli) {
  json arr = json::array();
  for (const auto &s : stimuli) {
    json toks = json::array();
    for (const auto &t : s.tokens)
      toks.push_back({{"text", t.text}, {"pos", t.pos}});
    arr.push_back({{"sentence_id", s.sentence_id},
                   {"voice", to_string(s.voice)},
                   {"dataset_id", to_string(s.dataset_id)},
                   {"tokens", toks}});
  }
  return arr;
}

inline std::vector<SentenceStimulus> stimuli_from_json(const json &arr) {
  if (!arr.is_array())
    throw DataError("stimulus file must hold a JSON array");
  std::vector<SentenceStimulus> out;
  std::set<std::string> seen;
  for (const auto &j : arr) {
    try {
      SentenceStimulus s;
      s.sentence_id = j.at("sentence_id").get<std::string>();
      s.voice = parse_voice(j.at("voice").get<std::string>());
      s.dataset_id = parse_dataset(j.value("dataset_id", std::string("simulated")));
      for (const auto &t : j.at("tokens")) {
        WordToken w;
        w.text = lowercase(t.at("text").get<std::string>());
        w.pos = t.value("pos", std::string());
        w.sentence_id = s.sentence_id;
        w.position = s.tokens.size();
        s.tokens.push_back(std::move(w));
      }
      validate(s);
      if (!seen.insert(s.sentence_id).second)
        throw DataError("duplicate sentence_id " + s.sentence_id);
      out.push_back(std::move(s));
    } catch (const json::exception &e) {
      throw DataError(std::string("malformed stimulus entry: ") + e.what());
    }
  }
  return out;
}

inline json read_json_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

inline void write_text_file(const fs::path &path, const std::string &text) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw DataError("cannot open " + path.string() + " for writing");
  out << text;
}

inline void write_json_file(const fs::path &path, const json &j) { write_text_file(path, j.dump(2) + "\n"); }

inline std::vector<SentenceStimulus> load_stimuli(const fs::path &path) { return stimuli_from_json(read_json_file(path)); }

inline void save_stimuli(const fs::path &path, const std::vector<SentenceStimulus> &stimuli) {
  write_json_file(path, stimuli_to_json(stimuli));
}

/// sentence_id -> stimulus lookup.
class StimulusIndex {
public:
  StimulusIndex() = default;
  explicit StimulusIndex(const std::vector<SentenceStimulus> &stimuli) {
    for (const auto &s : stimuli)
      by_id_.emplace(s.sentence_id, &s);
  }
  const SentenceStimulus *find(const std::string &id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : it->second;
  }
  const WordToken *token(const StimulusKey &k) const {
    const auto *s = find(k.sentence_id);
    if (!s || k.position >= s->tokens.size())
      return nullptr;
    return &s->tokens[k.position];
  }

private:
  std::map<std::string, const SentenceStimulus *> by_id_;
};

// ---------------------------------------------------------------------------
// Epochs and responses

struct Epoch {
  std::string subject_id;
  std::string sentence_id;
  std::size_t position = 0;
  int repetition = 1; // 0 marks a repetition average
  Matrix samples;     // sensors x T
  double sample_rate = 500.0;

  StimulusKey key() const { return {sentence_id, position}; }
};

struct BrainResponse {
  std::string subject_id;
  std::string sentence_id;
  std::size_t position = 0;
  int repetition = 0;
  Matrix values; // sensors x windows

  StimulusKey key() const { return {sentence_id, position}; }

  /// Row-major (sensor-major) flattening: index = sensor * windows + window.
  RowVector flatten() const {
    RowVector v(values.size());
    Eigen::Index k = 0;
    for (Eigen::Index s = 0; s < values.rows(); ++s)
      for (Eigen::Index w = 0; w < values.cols(); ++w)
        v(k++) = values(s, w);
    return v;
  }
};

inline Matrix unflatten(const RowVector &v, Eigen::Index sensors, Eigen::Index windows) {
  if (v.size() != sensors * windows)
    throw DataError("flattened length " + std::to_string(v.size()) + " does not match " + std::to_string(sensors) +
                    "x" + std::to_string(windows));
  Matrix m(sensors, windows);
  Eigen::Index k = 0;
  for (Eigen::Index s = 0; s < sensors; ++s)
    for (Eigen::Index w = 0; w < windows; ++w)
      m(s, w) = v(k++);
  return m;
}

/// Shape parameters; defaults are 306 sensors, 500 ms epochs, 100 ms windows.
struct RecordingShape {
  int sensors = 306;
  double epoch_ms = 500.0;
  double window_ms = 100.0;
  double sample_rate = 500.0;

  int windows() const { return static_cast<int>(epoch_ms / window_ms); }
  int samples() const { return static_cast<int>(epoch_ms * sample_rate / 1000.0); }
};

namespace detail {
inline std::tuple<const std::string &, const std::string &, std::size_t, int>
epoch_order(const std::string &subject, const std::string &sentence, std::size_t pos, int rep) {
  return {subject, sentence, pos, rep};
}

inline std::string describe_entry(const std::string &sentence, std::size_t pos, int rep) {
  return "epoch (sentence " + sentence + ", position " + std::to_string(pos) + ", repetition " + std::to_string(rep) + ")";
}

inline std::string payload_name(const std::string &sentence, std::size_t pos, int rep) {
  return sentence + "_p" + std::to_string(pos) + "_r" + std::to_string(rep) + ".f32";
}
} // namespace detail

inline void sort_epochs(std::vector<Epoch> &epochs) {
  std::sort(epochs.begin(), epochs.end(), [](const Epoch &a, const Epoch &b) {
    return detail::epoch_order(a.subject_id, a.sentence_id, a.position, a.repetition) <
           detail::epoch_order(b.subject_id, b.sentence_id, b.position, b.repetition);
  });
}

inline void sort_responses(std::vector<BrainResponse> &rs) {
  std::sort(rs.begin(), rs.end(), [](const BrainResponse &a, const BrainResponse &b) {
    return detail::epoch_order(a.subject_id, a.sentence_id, a.position, a.repetition) <
           detail::epoch_order(b.subject_id, b.sentence_id, b.position, b.repetition);
  });
}

/// Loads `epochs.json` plus its per-epoch payloads. A directory without a manifest
/// yields an empty collection and a warning on `warn`.
inline std::vector<Epoch> load_epochs(const fs::path &dir, std::ostream &warn = std::cerr) {
  const auto manifest_path = dir / "epochs.json";
  if (!fs::exists(manifest_path)) {
    warn << "warning: no epochs.json in " << dir.string() << "; empty epoch collection\n";
    return {};
  }
  const json m = read_json_file(manifest_path);
  std::vector<Epoch> out;
  try {
    const auto subject = m.at("subject_id").get<std::string>();
    const double rate = m.at("sample_rate").get<double>();
    const int sensors = m.at("sensors").get<int>();
    if (rate <= 0 || sensors <= 0)
      throw DataError("epochs.json: sample_rate and sensors must be positive");
    std::optional<long> expected_cols;
    if (m.contains("epoch_ms")) {
      const double t = m.at("epoch_ms").get<double>() * rate / 1000.0;
      if (t != std::floor(t))
        throw DataError("epochs.json: epoch_ms x sample_rate is not a whole number of samples");
      expected_cols = static_cast<long>(t);
    }
    for (const auto &e : m.at("entries")) {
      Epoch ep;
      ep.subject_id = subject;
      ep.sample_rate = rate;
      ep.sentence_id = e.at("sentence_id").get<std::string>();
      ep.position = e.at("position").get<std::size_t>();
      ep.repetition = e.at("repetition").get<int>();
      const auto rows = e.at("rows").get<long>();
      const auto cols = e.at("cols").get<long>();
      const auto who = detail::describe_entry(ep.sentence_id, ep.position, ep.repetition);
      if (ep.repetition < 1)
        throw DataError(who + ": repetition must be >= 1");
      if (rows != sensors)
        throw DataError(who + ": declares " + std::to_string(rows) + " rows but the store has " +
                        std::to_string(sensors) + " sensors");
      if (expected_cols && cols != *expected_cols)
        throw DataError(who + ": has " + std::to_string(cols) + " samples, expected " + std::to_string(*expected_cols));
      try {
        ep.samples = read_f32le(dir / e.at("payload").get<std::string>(), rows, cols);
      } catch (const DataError &err) {
        throw DataError(who + ": " + err.what());
      }
      out.push_back(std::move(ep));
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed epochs.json: ") + e.what());
  }
  sort_epochs(out);
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].sentence_id == out[i - 1].sentence_id && out[i].position == out[i - 1].position &&
        out[i].repetition == out[i - 1].repetition)
      throw DataError(detail::describe_entry(out[i].sentence_id, out[i].position, out[i].repetition) +
                      ": duplicated in manifest");
  return out;
}

/// Writes an epoch store. All epochs must share subject, sample rate and sensor count.
inline void save_epochs(const fs::path &dir, const std::vector<Epoch> &epochs, std::optional<double> epoch_ms = {},
                        const json &provenance = json()) {
  fs::create_directories(dir);
  std::vector<Epoch> sorted = epochs;
  sort_epochs(sorted);
  json m;
  m["format_version"] = 1;
  m["subject_id"] = sorted.empty() ? std::string() : sorted.front().subject_id;
  m["sample_rate"] = sorted.empty() ? 500.0 : sorted.front().sample_rate;
  m["sensors"] = sorted.empty() ? 0 : static_cast<int>(sorted.front().samples.rows());
  if (epoch_ms)
    m["epoch_ms"] = *epoch_ms;
  json entries = json::array();
  for (const auto &e : sorted) {
    if (e.subject_id != m["subject_id"].get<std::string>() || e.samples.rows() != m["sensors"].get<int>())
      throw DataError("save_epochs: mixed subjects or sensor counts");
    const auto name = detail::payload_name(e.sentence_id, e.position, e.repetition);
    write_f32le(dir / name, e.samples);
    entries.push_back({{"sentence_id", e.sentence_id},
                       {"position", e.position},
                       {"repetition", e.repetition},
                       {"payload", name},
                       {"rows", e.samples.rows()},
                       {"cols", e.samples.cols()}});
  }
  m["entries"] = entries;
  if (!provenance.is_null())
    m["provenance"] = provenance;
  write_json_file(dir / "epochs.json", m);
}

/// Response store: `responses.json` + payloads, same binary convention as epochs.
inline void save_responses(const fs::path &dir, const std::vector<BrainResponse> &responses, double window_ms,
                           const json &provenance = json(), const json &extra = json()) {
  fs::create_directories(dir);
  std::vector<BrainResponse> sorted = responses;
  sort_responses(sorted);
  json m;
  m["format_version"] = 1;
  m["subject_id"] = sorted.empty() ? std::string() : sorted.front().subject_id;
  m["sensors"] = sorted.empty() ? 0 : static_cast<int>(sorted.front().values.rows());
  m["windows"] = sorted.empty() ? 0 : static_cast<int>(sorted.front().values.cols());
  m["window_ms"] = window_ms;
  json entries = json::array();
  for (const auto &r : sorted) {
    if (r.values.rows() != m["sensors"].get<int>() || r.values.cols() != m["windows"].get<int>())
      throw DataError("save_responses: mixed response shapes");
    const auto name = detail::payload_name(r.sentence_id, r.position, r.repetition);
    write_f32le(dir / name, r.values);
    entries.push_back({{"sentence_id", r.sentence_id},
                       {"position", r.position},
                       {"repetition", r.repetition},
                       {"payload", name},
                       {"rows", r.values.rows()},
                       {"cols", r.values.cols()}});
  }
  m["entries"] = entries;
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it)
      m[it.key()] = it.value();
  if (!provenance.is_null())
    m["provenance"] = provenance;
  write_json_file(dir / "responses.json", m);
}

inline std::vector<BrainResponse> load_responses(const fs::path &dir) {
  const json m = read_json_file(dir / "responses.json");
  std::vector<BrainResponse> out;
  try {
    const auto subject = m.at("subject_id").get<std::string>();
    const int sensors = m.at("sensors").get<int>();
    const int windows = m.at("windows").get<int>();
    for (const auto &e : m.at("entries")) {
      BrainResponse r;
      r.subject_id = subject;
      r.sentence_id = e.at("sentence_id").get<std::string>();
      r.position = e.at("position").get<std::size_t>();
      r.repetition = e.at("repetition").get<int>();
      const auto who = detail::describe_entry(r.sentence_id, r.position, r.repetition);
      if (e.at("rows").get<int>() != sensors || e.at("cols").get<int>() != windows)
        throw DataError(who + ": shape differs from store header");
      try {
        r.values = read_f32le(dir / e.at("payload").get<std::string>(), sensors, windows);
      } catch (const DataError &err) {
        throw DataError(who + ": " + err.what());
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed responses.json: ") + e.what());
  }
  sort_responses(out);
  return out;
}

// ---------------------------------------------------------------------------
// Sensor atlas

enum class Hemisphere { L, R };
enum class Lobe { frontal, temporal, parietal, occipital };

inline constexpr std::array<Lobe, 4> kLobes{Lobe::frontal, Lobe::temporal, Lobe::parietal, Lobe::occipital};

inline std::string to_string(Hemisphere h) { return h == Hemisphere::L ? "L" : "R"; }
inline std::string to_string(Lobe l) {
  switch (l) {
  case Lobe::frontal: return "frontal";
  case Lobe::temporal: return "temporal";
  case Lobe::parietal: return "parietal";
  case Lobe::occipital: return "occipital";
  }
  return "frontal";
}

inline Hemisphere parse_hemisphere(const std::string &s) {
  if (s == "L" || s == "l" || s == "left")
    return Hemisphere::L;
  if (s == "R" || s == "r" || s == "right")
    return Hemisphere::R;
  throw DataError("unknown hemisphere '" + s + "'");
}

inline Lobe parse_lobe(const std::string &s) {
  for (auto l : kLobes)
    if (to_string(l) == s)
      return l;
  throw DataError("unknown lobe '" + s + "'");
}

struct SensorRegion {
  Hemisphere hemisphere;
  Lobe lobe;
};

class RegionAtlas {
public:
  RegionAtlas() = default;

  /// `regions[i]` is the region of sensor i.
  explicit RegionAtlas(std::vector<SensorRegion> regions) : regions_(std::move(regions)) {}

  std::size_t sensors() const { return regions_.size(); }
  const SensorRegion &at(std::size_t sensor) const { return regions_.at(sensor); }

private:
  std::vector<SensorRegion> regions_;
};

/// Parses `sensor_index,hemisphere,lobe` CSV. Lines starting with '#' are comments and a
/// header row is optional. Every index 0..n-1 must appear exactly once.
inline RegionAtlas parse_atlas_csv(std::istream &in) {
  std::map<long, SensorRegion> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("sensor_index", 0) == 0)
      continue;
    std::stringstream ss(line);
    std::string idx, hemi, lobe;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, hemi, ',') || !std::getline(ss, lobe, ','))
      throw DataError("atlas line " + std::to_string(lineno) + ": expected sensor_index,hemisphere,lobe");
    long i = 0;
    try {
      std::size_t used = 0;
      i = std::stol(idx, &used);
      if (used != idx.size())
        throw std::invalid_argument(idx);
    } catch (const std::exception &) {
      throw DataError("atlas line " + std::to_string(lineno) + ": bad sensor index '" + idx + "'");
    }
    SensorRegion r{parse_hemisphere(hemi), parse_lobe(lobe)};
    if (!rows.emplace(i, r).second)
      throw DataError("atlas: sensor " + std::to_string(i) + " mapped more than once");
  }
  std::vector<SensorRegion> regions;
  regions.reserve(rows.size());
  long expect = 0;
  for (const auto &[i, r] : rows) {
    if (i != expect)
      throw DataError("atlas: sensor " + std::to_string(expect) + " is not mapped");
    regions.push_back(r);
    ++expect;
  }
  return RegionAtlas(std::move(regions));
}

inline RegionAtlas load_atlas(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open atlas " + path.string());
  return parse_atlas_csv(in);
}

/// A hemisphere set plus an optional lobe; lobe unset means every lobe.
struct RegionSelector {
  std::set<Hemisphere> hemispheres{Hemisphere::L, Hemisphere::R};
  std::optional<Lobe> lobe;

  std::string name() const {
    if (!lobe)
      return hemispheres.size() == 2 ? "all" : to_string(*hemispheres.begin()) + "-all";
    if (hemispheres.size() == 2)
      return "bilateral-" + to_string(*lobe);
    return to_string(*hemispheres.begin()) + "-" + to_string(*lobe);
  }

  bool matches(const SensorRegion &r) const {
    return hemispheres.count(r.hemisphere) && (!lobe || *lobe == r.lobe);
  }
};

/// Accepts "all", "L-temporal", "R-occipital", "bilateral-frontal", "L-all".
inline RegionSelector parse_region(const std::string &s) {
  RegionSelector sel;
  if (s == "all")
    return sel;
  const auto dash = s.find('-');
  if (dash == std::string::npos)
    throw DataError("bad region selector '" + s + "'");
  const auto hemi = s.substr(0, dash);
  const auto lobe = s.substr(dash + 1);
  if (hemi != "bilateral")
    sel.hemispheres = {parse_hemisphere(hemi)};
  if (lobe != "all")
    sel.lobe = parse_lobe(lobe);
  return sel;
}

/// Sorted sensor indices of a region; throws when the region is empty.
inline std::vector<Eigen::Index> region_sensors(const RegionAtlas &atlas, const RegionSelector &sel) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < atlas.sensors(); ++i)
    if (sel.matches(atlas.at(i)))
      idx.push_back(static_cast<Eigen::Index>(i));
  if (idx.empty())
    throw DataError("region " + sel.name() + " has no sensors in the atlas");
  return idx;
}

/// Flattened-feature columns (sensor * windows + window) belonging to a region.
inline std::vector<Eigen::Index> region_columns(const RegionAtlas &atlas, const RegionSelector &sel,
                                                Eigen::Index windows) {
  std::vector<Eigen::Index> cols;
  for (auto s : region_sensors(atlas, sel))
    for (Eigen::Index w = 0; w < windows; ++w)
      cols.push_back(s * windows + w);
  return cols;
}

inline BrainResponse region_slice(const BrainResponse &response, const RegionAtlas &atlas,
                                  const RegionSelector &sel) {
  if (atlas.sensors() != static_cast<std::size_t>(response.values.rows()))
    throw DataError("atlas covers " + std::to_string(atlas.sensors()) + " sensors but response has " +
                    std::to_string(response.values.rows()));
  const auto idx = region_sensors(atlas, sel);
  BrainResponse out = response;
  out.values = response.values(idx, Eigen::all);
  return out;
}

} // namespace megalign

#endif // MEGALIGN_CORE_DATA_HPP
