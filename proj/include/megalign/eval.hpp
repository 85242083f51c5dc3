#ifndef MEGALIGN_EVAL_HPP
#define MEGALIGN_EVAL_HPP

// Pairwise (2 vs 2) classification of predicted against observed responses under k-fold
// cross-validation. A pair (i, j) is correct when the matched distances do not exceed the
// mismatched ones:  d(p_i, y_i) + d(p_j, y_j) <= d(p_i, y_j) + d(p_j, y_i).

#include "megalign/features.hpp"
#include "megalign/ridge.hpp"

#include <cmath>
#include <map>
#include <numeric>

namespace megalign {

using IndexPair = std::pair<Eigen::Index, Eigen::Index>;

struct PairwiseResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<bool> outcomes;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

inline bool pair_correct(const Matrix &pred, const Matrix &truth, Eigen::Index i, Eigen::Index j) {
  const double matched = (pred.row(i) - truth.row(i)).norm() + (pred.row(j) - truth.row(j)).norm();
  const double crossed = (pred.row(i) - truth.row(j)).norm() + (pred.row(j) - truth.row(i)).norm();
  return matched <= crossed;
}

inline PairwiseResult pairwise_accuracy(const Matrix &pred, const Matrix &truth, const std::vector<IndexPair> &pairs) {
  if (pairs.empty())
    throw DataError("pairwise_accuracy: empty pair list");
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw DataError("pairwise_accuracy: predictions and responses are not row-aligned");
  PairwiseResult r;
  r.outcomes.reserve(pairs.size());
  for (const auto &[i, j] : pairs) {
    if (i == j || i < 0 || j < 0 || i >= pred.rows() || j >= pred.rows())
      throw DataError("pairwise_accuracy: invalid pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    const bool ok = pair_correct(pred, truth, i, j);
    r.outcomes.push_back(ok);
    r.correct += ok ? 1 : 0;
  }
  r.total = pairs.size();
  return r;
}

// ---------------------------------------------------------------------------
// Folds

struct FoldSpec {
  int k = 5;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignment; // sentence_id -> fold

  int fold_of(const std::string &sentence_id) const {
    auto it = assignment.find(sentence_id);
    if (it == assignment.end())
      throw DataError("sentence " + sentence_id + " has no fold assignment");
    return it->second;
  }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(static_cast<std::size_t>(k), 0);
    for (const auto &[id, f] : assignment)
      ++s[static_cast<std::size_t>(f)];
    return s;
  }
};

/// Sentence-level folds, stratified by voice: each voice group is shuffled with its own keyed
/// stream, then the groups are dealt round-robin with one shared counter, so fold sizes differ
/// by at most one overall.
inline FoldSpec make_folds(const std::vector<SentenceStimulus> &stimuli, int k, std::uint64_t seed) {
  if (k < 2)
    throw UsageError("make_folds: k must be at least 2, got " + std::to_string(k));
  if (stimuli.size() < static_cast<std::size_t>(k))
    throw DataError("make_folds: " + std::to_string(stimuli.size()) + " sentences cannot fill " + std::to_string(k) +
                    " folds");
  FoldSpec spec;
  spec.k = k;
  spec.seed = seed;
  std::size_t counter = 0;
  for (Voice v : {Voice::active, Voice::passive}) {
    std::vector<std::string> ids;
    for (const auto &s : stimuli)
      if (s.voice == v)
        ids.push_back(s.sentence_id);
    std::sort(ids.begin(), ids.end());
    auto gen = KeyedRng(seed).with("folds").with(to_string(v)).engine();
    keyed_shuffle(ids, gen);
    for (const auto &id : ids)
      spec.assignment[id] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Feature/response alignment

/// Row-aligned regression data: X row i and Y row i belong to keys[i].
struct AlignedData {
  std::vector<StimulusKey> keys;
  std::vector<std::string> tokens;
  Matrix X;
  Matrix Y;
  Eigen::Index sensors = 0;
  Eigen::Index windows = 0;

  std::optional<Eigen::Index> index_of(const StimulusKey &k) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it == keys.end() || !(*it == k))
      return std::nullopt;
    return static_cast<Eigen::Index>(it - keys.begin());
  }
};

/// Joins feature rows with responses on (sentence_id, position). Every feature row needs
/// exactly one response; responses without a feature row are ignored. Rows come out sorted
/// by key.
inline AlignedData align(const FeatureMatrix &features, const std::vector<BrainResponse> &responses) {
  std::map<StimulusKey, const BrainResponse *> by_key;
  for (const auto &r : responses)
    if (!by_key.emplace(r.key(), &r).second)
      throw DataError("responses: stimulus " + to_string(r.key()) +
                      " appears more than once (select a single repetition first)");
  std::vector<std::pair<StimulusKey, Eigen::Index>> order;
  for (std::size_t i = 0; i < features.bindings.size(); ++i)
    order.emplace_back(features.bindings[i].key(), static_cast<Eigen::Index>(i));
  std::sort(order.begin(), order.end());
  AlignedData d;
  if (responses.empty())
    throw DataError("align: no responses");
  d.sensors = responses.front().values.rows();
  d.windows = responses.front().values.cols();
  d.X.resize(static_cast<Eigen::Index>(order.size()), features.dim());
  d.Y.resize(static_cast<Eigen::Index>(order.size()), d.sensors * d.windows);
  Eigen::Index r = 0;
  for (const auto &[key, src] : order) {
    auto it = by_key.find(key);
    if (it == by_key.end())
      throw DataError(features.name() + ": no response for stimulus " + to_string(key));
    const auto &resp = *it->second;
    if (resp.values.rows() != d.sensors || resp.values.cols() != d.windows)
      throw DataError("responses: mixed shapes");
    d.keys.push_back(key);
    d.tokens.push_back(features.bindings[static_cast<std::size_t>(src)].token);
    d.X.row(r) = features.rows.row(src);
    d.Y.row(r) = resp.flatten();
    ++r;
  }
  return d;
}

/// Keeps responses of a single repetition (0 = repetition average).
inline std::vector<BrainResponse> select_repetition(const std::vector<BrainResponse> &rs, int repetition) {
  std::vector<BrainResponse> out;
  for (const auto &r : rs)
    if (r.repetition == repetition)
      out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Stimulus subsets

struct SubsetFilter {
  std::string name = "all";
  std::function<bool(const SentenceStimulus &, const WordToken &)> keep = [](const SentenceStimulus &,
                                                                             const WordToken &) { return true; };
};

inline SubsetFilter parse_subset(const std::string &name) {
  SubsetFilter f;
  f.name = name;
  if (name == "all")
    return f;
  if (name == "nouns")
    f.keep = [](const SentenceStimulus &, const WordToken &t) { return is_noun_tag(t.pos); };
  else if (name == "verbs")
    f.keep = [](const SentenceStimulus &, const WordToken &t) { return is_main_verb(t); };
  else if (name == "determiners")
    f.keep = [](const SentenceStimulus &, const WordToken &t) { return is_determiner_tag(t.pos); };
  else if (name == "adjectives")
    f.keep = [](const SentenceStimulus &, const WordToken &t) { return is_adjective_tag(t.pos); };
  else if (name == "active")
    f.keep = [](const SentenceStimulus &s, const WordToken &) { return s.voice == Voice::active; };
  else if (name == "passive")
    f.keep = [](const SentenceStimulus &s, const WordToken &) { return s.voice == Voice::passive; };
  else
    throw UsageError("unknown subset '" + name + "' (all|nouns|verbs|determiners|adjectives|active|passive)");
  return f;
}

inline std::vector<bool> subset_mask(const AlignedData &d, const StimulusIndex &stimuli, const SubsetFilter &f) {
  std::vector<bool> mask(d.keys.size());
  for (std::size_t i = 0; i < d.keys.size(); ++i) {
    const auto *s = stimuli.find(d.keys[i].sentence_id);
    if (!s || d.keys[i].position >= s->tokens.size())
      throw DataError("stimulus " + to_string(d.keys[i]) + " is not in the stimulus file");
    mask[i] = f.keep(*s, s->tokens[d.keys[i].position]);
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Cross-validated fitting

struct FoldOutput {
  int fold = 0;
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test; // indices into AlignedData rows
  Matrix pred;                    // test rows, normalized response space
  Matrix truth;                   // test rows, normalized with the training statistics
  double lambda = 0.0;
};

struct FitOptions {
  LambdaGrid grid;
  LambdaMode mode = LambdaMode::shared;
  unsigned threads = 1;
};

/// Reorders training responses; receives (fold, training row count) and returns a permutation.
using TrainShuffler = std::function<std::vector<Eigen::Index>(int fold, std::size_t n_train)>;

/// Fits one encoder per fold on the training rows (optionally restricted by `train_mask`) and
/// predicts every test row. `columns` restricts the response features (region analyses).
inline std::vector<FoldOutput> fit_predict_folds(const AlignedData &d, const FoldSpec &folds, const FitOptions &opts,
                                                 const std::vector<Eigen::Index> *columns = nullptr,
                                                 const std::vector<bool> *train_mask = nullptr,
                                                 const TrainShuffler &shuffle = nullptr) {
  const Matrix Yall = columns ? Matrix(d.Y(Eigen::all, *columns)) : d.Y;
  std::vector<FoldOutput> out(static_cast<std::size_t>(folds.k));
  for (int f = 0; f < folds.k; ++f)
    out[static_cast<std::size_t>(f)].fold = f;
  for (std::size_t i = 0; i < d.keys.size(); ++i) {
    const int f = folds.fold_of(d.keys[i].sentence_id);
    if (f < 0 || f >= folds.k)
      throw DataError("fold index out of range for " + d.keys[i].sentence_id);
    out[static_cast<std::size_t>(f)].test.push_back(static_cast<Eigen::Index>(i));
  }
  for (auto &fo : out)
    for (std::size_t i = 0; i < d.keys.size(); ++i)
      if (folds.fold_of(d.keys[i].sentence_id) != fo.fold && (!train_mask || (*train_mask)[i]))
        fo.train.push_back(static_cast<Eigen::Index>(i));
  for (const auto &fo : out)
    if (fo.train.size() < 2)
      throw DataError("fold " + std::to_string(fo.fold) + " has fewer than 2 training stimuli");
  parallel_for(out.size(), opts.threads, [&](std::size_t fi) {
    auto &fo = out[fi];
    const Matrix Xtr = d.X(fo.train, Eigen::all);
    Matrix Ytr = Yall(fo.train, Eigen::all);
    if (shuffle) {
      const auto perm = shuffle(fo.fold, fo.train.size());
      Ytr = Matrix(Ytr(perm, Eigen::all));
    }
    EncoderOptions eo;
    eo.grid = opts.grid;
    eo.mode = opts.mode;
    const auto enc = fit_encoder(Xtr, Ytr, eo);
    fo.lambda = enc.model.lambda;
    if (fo.test.empty()) {
      fo.pred.resize(0, Ytr.cols());
      fo.truth.resize(0, Ytr.cols());
      return;
    }
    fo.pred = encode_normalized(enc.model, d.X(fo.test, Eigen::all));
    fo.truth = apply_normalization(*enc.model.output_norm, Matrix(Yall(fo.test, Eigen::all)));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reports

struct FoldScore {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
  double lambda = 0.0;
};

struct EvalResult {
  std::string model_id;
  std::string layer_id;
  std::string region = "all";
  std::string subset = "all";
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<FoldScore> folds;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct PermutationReport {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> accuracies;
  double mean = 0.0;
  double stddev = 0.0;
};

struct EvalOptions {
  FitOptions fit;
  bool exclude_same_word = false;
  std::size_t pair_cap = 0; // 0 = all pairs
  std::uint64_t pair_seed = 0;
  bool train_on_subset = false;
};

/// Unordered pairs (a < b) of test rows passing the mask, optionally excluding same-text
/// pairs and capped by a keyed sample.
inline std::vector<IndexPair> test_pairs(const AlignedData &d, const FoldOutput &fo, const std::vector<bool> &mask,
                                         const EvalOptions &opts) {
  std::vector<IndexPair> pairs;
  for (std::size_t a = 0; a < fo.test.size(); ++a) {
    if (!mask[static_cast<std::size_t>(fo.test[a])])
      continue;
    for (std::size_t b = a + 1; b < fo.test.size(); ++b) {
      if (!mask[static_cast<std::size_t>(fo.test[b])])
        continue;
      if (opts.exclude_same_word &&
          d.tokens[static_cast<std::size_t>(fo.test[a])] == d.tokens[static_cast<std::size_t>(fo.test[b])])
        continue;
      pairs.emplace_back(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  if (opts.pair_cap > 0 && pairs.size() > opts.pair_cap) {
    auto gen = KeyedRng(opts.pair_seed).with("pairs").with(static_cast<std::uint64_t>(fo.fold)).engine();
    keyed_shuffle(pairs, gen);
    pairs.resize(opts.pair_cap);
    std::sort(pairs.begin(), pairs.end());
  }
  return pairs;
}

inline std::size_t count_test_rows(const FoldOutput &fo, const std::vector<bool> &mask) {
  std::size_t n = 0;
  for (auto i : fo.test)
    n += mask[static_cast<std::size_t>(i)] ? 1 : 0;
  return n;
}

/// Scores one subset over fold outputs; pooled accuracy = total correct / total pairs.
inline EvalResult score_folds(const AlignedData &d, const std::vector<FoldOutput> &outs, const std::vector<bool> &mask,
                              const EvalOptions &opts) {
  EvalResult r;
  for (const auto &fo : outs) {
    const auto n_test = count_test_rows(fo, mask);
    if (n_test < 2)
      throw DataError("fold " + std::to_string(fo.fold) + " has " + std::to_string(n_test) +
                      " test stimuli after filtering; need at least 2");
    const auto pairs = test_pairs(d, fo, mask, opts);
    FoldScore fs{fo.fold, fo.train.size(), n_test, 0, 0, fo.lambda};
    if (!pairs.empty()) {
      const auto pr = pairwise_accuracy(fo.pred, fo.truth, pairs);
      fs.correct = pr.correct;
      fs.total = pr.total;
    }
    r.correct += fs.correct;
    r.total += fs.total;
    r.folds.push_back(fs);
  }
  if (r.total == 0)
    throw DataError("no scoreable pairs in any fold");
  return r;
}

/// Full cross-validated evaluation of one feature matrix for a set of subsets within one
/// region. Without `train_on_subset` the fits are shared by all subsets.
inline std::vector<EvalResult> cross_validated_eval(const FeatureMatrix &features,
                                                    const std::vector<BrainResponse> &responses,
                                                    const std::vector<SentenceStimulus> &stimuli,
                                                    const FoldSpec &folds, const std::vector<SubsetFilter> &subsets,
                                                    const RegionSelector &region, const RegionAtlas *atlas,
                                                    const EvalOptions &opts = {}) {
  const auto d = align(features, responses);
  const StimulusIndex idx(stimuli);
  std::optional<std::vector<Eigen::Index>> cols;
  if (region.name() != "all") {
    if (!atlas)
      throw UsageError("region " + region.name() + " requested without an atlas");
    if (atlas->sensors() != static_cast<std::size_t>(d.sensors))
      throw DataError("atlas covers " + std::to_string(atlas->sensors()) + " sensors, responses have " +
                      std::to_string(d.sensors));
    cols = region_columns(*atlas, region, d.windows);
  }
  std::vector<EvalResult> results;
  std::optional<std::vector<FoldOutput>> shared;
  for (const auto &sub : subsets) {
    const auto mask = subset_mask(d, idx, sub);
    std::vector<FoldOutput> local;
    const std::vector<FoldOutput> *outs = nullptr;
    if (opts.train_on_subset) {
      local = fit_predict_folds(d, folds, opts.fit, cols ? &*cols : nullptr, &mask);
      outs = &local;
    } else {
      if (!shared)
        shared = fit_predict_folds(d, folds, opts.fit, cols ? &*cols : nullptr);
      outs = &*shared;
    }
    auto r = score_folds(d, *outs, mask, opts);
    r.model_id = features.model_id;
    r.layer_id = features.layer_id;
    r.region = region.name();
    r.subset = sub.name;
    results.push_back(std::move(r));
  }
  return results;
}

inline EvalResult cross_validated_eval(const FeatureMatrix &features, const std::vector<BrainResponse> &responses,
                                       const std::vector<SentenceStimulus> &stimuli, const FoldSpec &folds,
                                       const SubsetFilter &subset = {}, const EvalOptions &opts = {}) {
  return cross_validated_eval(features, responses, stimuli, folds, std::vector<SubsetFilter>{subset}, RegionSelector{},
                              nullptr, opts)
      .front();
}

inline void summarize(PermutationReport &rep) {
  rep.count = rep.accuracies.size();
  if (rep.accuracies.empty())
    return;
  double acc = 0.0;
  for (double a : rep.accuracies)
    acc += a;
  rep.mean = acc / static_cast<double>(rep.count);
  double ss = 0.0;
  for (double a : rep.accuracies)
    ss += (a - rep.mean) * (a - rep.mean);
  rep.stddev = rep.count > 1 ? std::sqrt(ss / static_cast<double>(rep.count - 1)) : 0.0;
}

/// Shuffler drawing one stream per permutation index; folds take successive shuffles from it
/// in fold order, so the result is independent of fold scheduling.
inline std::vector<std::vector<Eigen::Index>> permutation_orders(const std::vector<FoldOutput> &layout,
                                                                 std::uint64_t seed, std::size_t perm_index) {
  auto gen = KeyedRng(seed).with("permutation").with(static_cast<std::uint64_t>(perm_index)).engine();
  std::vector<std::vector<Eigen::Index>> orders;
  for (const auto &fo : layout) {
    std::vector<Eigen::Index> p(fo.train.size());
    std::iota(p.begin(), p.end(), Eigen::Index{0});
    keyed_shuffle(p, gen);
    orders.push_back(std::move(p));
  }
  return orders;
}

/// Chance distribution: training stimulus->response bindings are shuffled within each fold
/// (test bindings stay true) and the whole pipeline is rerun per permutation.
inline PermutationReport permutation_test(const FeatureMatrix &features, const std::vector<BrainResponse> &responses,
                                          const std::vector<SentenceStimulus> &stimuli, const FoldSpec &folds,
                                          std::size_t n_perm, std::uint64_t seed, const SubsetFilter &subset = {},
                                          const EvalOptions &opts = {}) {
  if (n_perm < 1)
    throw UsageError("permutation_test: n_perm must be >= 1");
  const auto d = align(features, responses);
  const auto mask = subset_mask(d, StimulusIndex(stimuli), subset);
  // fold layout only (train/test indices)
  std::vector<FoldOutput> layout(static_cast<std::size_t>(folds.k));
  for (int f = 0; f < folds.k; ++f)
    layout[static_cast<std::size_t>(f)].fold = f;
  for (std::size_t i = 0; i < d.keys.size(); ++i) {
    const auto f = static_cast<std::size_t>(folds.fold_of(d.keys[i].sentence_id));
    for (std::size_t g = 0; g < layout.size(); ++g)
      (g == f ? layout[g].test : layout[g].train).push_back(static_cast<Eigen::Index>(i));
  }
  PermutationReport rep;
  rep.seed = seed;
  rep.accuracies.assign(n_perm, 0.0);
  FitOptions inner = opts.fit;
  inner.threads = 1;
  EvalOptions eo = opts;
  eo.fit = inner;
  parallel_for(n_perm, opts.fit.threads, [&](std::size_t p) {
    const auto orders = permutation_orders(layout, seed, p);
    const TrainShuffler sh = [&](int fold, std::size_t) { return orders[static_cast<std::size_t>(fold)]; };
    const auto outs = fit_predict_folds(d, folds, inner, nullptr, nullptr, sh);
    rep.accuracies[p] = score_folds(d, outs, mask, eo).accuracy();
  });
  summarize(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// JSON / CSV

inline json to_json(const EvalResult &r) {
  json folds = json::array();
  for (const auto &f : r.folds)
    folds.push_back({{"fold", f.fold}, {"n_train", f.n_train}, {"n_test", f.n_test}, {"correct", f.correct},
                     {"pairs", f.total}, {"lambda", f.lambda}});
  return {{"model_id", r.model_id}, {"layer_id", r.layer_id}, {"region", r.region}, {"subset", r.subset},
          {"correct", r.correct},   {"pairs", r.total},       {"accuracy", r.accuracy()}, {"folds", folds}};
}

inline json to_json(const PermutationReport &p) {
  return {{"count", p.count}, {"seed", p.seed}, {"mean", p.mean}, {"stddev", p.stddev}, {"accuracies", p.accuracies}};
}

inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string eval_csv(const std::vector<EvalResult> &results) {
  std::string out = "model_id,layer_id,region,subset,correct,pairs,accuracy\n";
  for (const auto &r : results)
    out += r.model_id + "," + r.layer_id + "," + r.region + "," + r.subset + "," + std::to_string(r.correct) + "," +
           std::to_string(r.total) + "," + format_fixed(r.accuracy()) + "\n";
  return out;
}

} // namespace megalign

#endif // MEGALIGN_EVAL_HPP
