#ifndef MEGALIGN_AUGMENT_HPP
#define MEGALIGN_AUGMENT_HPP

// Synthetic brain data: a trained encoder predicts responses for new sentences, and a second
// (word vector -> response) model is trained with and without those predictions.

#include "megalign/eval.hpp"

namespace megalign {

struct SyntheticSample {
  std::string sentence_id;
  std::size_t position = 0;
  std::string token;
  BrainResponse response;
  std::string encoder_model;
  std::string encoder_layer;
};

/// One synthetic response per bound stimulus, in raw response units.
inline std::vector<SyntheticSample> synthesize(const RidgeModel &encoder, const FeatureMatrix &features,
                                               Eigen::Index sensors, Eigen::Index windows,
                                               const std::string &subject = "synthetic") {
  if (features.dim() != encoder.d_in())
    throw DataError("synthesize: features have dimension " + std::to_string(features.dim()) + ", encoder expects " +
                    std::to_string(encoder.d_in()));
  if (encoder.d_out() != sensors * windows)
    throw DataError("synthesize: encoder output size does not match " + std::to_string(sensors) + "x" +
                    std::to_string(windows));
  const Matrix Y = encode(encoder, features.rows);
  std::vector<SyntheticSample> out;
  out.reserve(static_cast<std::size_t>(features.size()));
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    const auto &b = features.bindings[static_cast<std::size_t>(i)];
    SyntheticSample s;
    s.sentence_id = b.sentence_id;
    s.position = b.position;
    s.token = b.token;
    s.encoder_model = features.model_id;
    s.encoder_layer = features.layer_id;
    s.response.subject_id = subject;
    s.response.sentence_id = b.sentence_id;
    s.response.position = b.position;
    s.response.repetition = 0;
    s.response.values = unflatten(Y.row(i), sensors, windows);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<BrainResponse> responses_of(const std::vector<SyntheticSample> &samples) {
  std::vector<BrainResponse> out;
  for (const auto &s : samples)
    out.push_back(s.response);
  return out;
}

/// Positions of the first token passing `keep` in each sentence (one candidate per sentence).
inline std::vector<StimulusKey> first_candidates(const std::vector<SentenceStimulus> &stimuli,
                                                 const SubsetFilter &keep) {
  std::vector<StimulusKey> out;
  for (const auto &s : stimuli)
    for (const auto &t : s.tokens)
      if (keep.keep(s, t)) {
        out.push_back({s.sentence_id, t.position});
        break;
      }
  return out;
}

/// Rows of `fm` restricted to `keys` (in key order).
inline FeatureMatrix restrict_rows(const FeatureMatrix &fm, const std::vector<StimulusKey> &keys) {
  std::map<StimulusKey, Eigen::Index> at;
  for (std::size_t i = 0; i < fm.bindings.size(); ++i)
    at[fm.bindings[i].key()] = static_cast<Eigen::Index>(i);
  FeatureMatrix out = fm;
  out.bindings.clear();
  out.rows.resize(static_cast<Eigen::Index>(keys.size()), fm.dim());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto it = at.find(keys[i]);
    if (it == at.end())
      throw DataError(fm.name() + ": no row for " + to_string(keys[i]));
    out.rows.row(static_cast<Eigen::Index>(i)) = fm.rows.row(it->second);
    out.bindings.push_back(fm.bindings[static_cast<std::size_t>(it->second)]);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct AugmentOptions {
  std::string selector = "nouns"; // subset of real and synthetic stimuli used by the decoder
  int folds = 4;
  std::size_t n_perm = 400;
  std::uint64_t seed = 0;
  double synthetic_weight = 1.0;
  bool within_category = true; // false: train/test on every real word, synthetic still filtered
  bool exclude_same_word = true; // word-vector inputs make same-word pairs exact ties
  FitOptions fit;
};

struct AugmentFold {
  int fold = 0;
  std::size_t n_train_real = 0;
  std::size_t n_train_synthetic = 0;
  std::size_t n_test = 0;
  std::size_t pairs = 0;
  std::size_t baseline_correct = 0;
  std::size_t augmented_correct = 0;
  double baseline_lambda = 0.0;
  double augmented_lambda = 0.0;
};

struct AugmentationReport {
  std::string selector;
  std::size_t pairs = 0;
  std::size_t baseline_correct = 0;
  std::size_t augmented_correct = 0;
  std::size_t synthetic_used = 0;
  PermutationReport chance;
  std::vector<AugmentFold> folds;

  double baseline_accuracy() const { return pairs ? static_cast<double>(baseline_correct) / static_cast<double>(pairs) : 0.0; }
  double augmented_accuracy() const { return pairs ? static_cast<double>(augmented_correct) / static_cast<double>(pairs) : 0.0; }
};

struct AugmentInputs {
  const FeatureMatrix *real_features = nullptr;   // decoder inputs (word vectors) for real stimuli
  const std::vector<BrainResponse> *real_responses = nullptr;
  const std::vector<SentenceStimulus> *real_stimuli = nullptr;
  const FeatureMatrix *synthetic_features = nullptr; // decoder inputs for synthetic stimuli
  const std::vector<BrainResponse> *synthetic_responses = nullptr;
  const std::vector<SentenceStimulus> *synthetic_stimuli = nullptr;
};

namespace detail {
struct AugmentFoldData {
  std::vector<Eigen::Index> train, test;
};

inline std::pair<std::size_t, std::size_t> score_pairs(const Matrix &pred, const Matrix &truth,
                                                       const std::vector<std::string> &words, bool exclude_same) {
  std::vector<IndexPair> pairs;
  for (Eigen::Index a = 0; a < pred.rows(); ++a)
    for (Eigen::Index b = a + 1; b < pred.rows(); ++b)
      if (!exclude_same || words[static_cast<std::size_t>(a)] != words[static_cast<std::size_t>(b)])
        pairs.emplace_back(a, b);
  if (pairs.empty())
    throw DataError("augmentation fold has no scoreable pairs");
  const auto r = pairwise_accuracy(pred, truth, pairs);
  return {r.correct, r.total};
}
} // namespace detail

/// Baseline (real only) versus augmented (real + synthetic) decoders evaluated on the same
/// held-out real responses. Normalization statistics come from the real training rows for both
/// models, so an empty synthetic set reproduces the baseline exactly.
inline AugmentationReport augmentation_experiment(const AugmentInputs &in, const AugmentOptions &opts) {
  if (!in.real_features || !in.real_responses || !in.real_stimuli)
    throw UsageError("augmentation_experiment: real data missing");
  const SubsetFilter sel = parse_subset(opts.selector);
  const SubsetFilter everything;

  const auto real = align(*in.real_features, *in.real_responses);
  const StimulusIndex real_idx(*in.real_stimuli);
  const auto real_mask = subset_mask(real, real_idx, opts.within_category ? sel : everything);

  std::set<std::string> real_ids;
  for (const auto &s : *in.real_stimuli)
    real_ids.insert(s.sentence_id);

  Matrix Xs(0, real.X.cols()), Ys(0, real.Y.cols());
  if (in.synthetic_features && in.synthetic_features->size() > 0) {
    if (!in.synthetic_responses || !in.synthetic_stimuli)
      throw UsageError("augmentation_experiment: synthetic features without responses or stimuli");
    const auto syn = align(*in.synthetic_features, *in.synthetic_responses);
    if (syn.X.cols() != real.X.cols() || syn.Y.cols() != real.Y.cols())
      throw DataError("augmentation_experiment: synthetic data shape differs from real data");
    const auto syn_mask = subset_mask(syn, StimulusIndex(*in.synthetic_stimuli), sel);
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < syn.keys.size(); ++i) {
      if (real_ids.count(syn.keys[i].sentence_id))
        throw DataError("synthetic sample " + to_string(syn.keys[i]) + " reuses a real sentence id");
      if (syn_mask[i])
        keep.push_back(static_cast<Eigen::Index>(i));
    }
    Xs = syn.X(keep, Eigen::all);
    Ys = syn.Y(keep, Eigen::all);
  }

  const auto folds = make_folds(*in.real_stimuli, opts.folds, opts.seed);
  std::vector<detail::AugmentFoldData> layout(static_cast<std::size_t>(folds.k));
  for (std::size_t i = 0; i < real.keys.size(); ++i) {
    if (!real_mask[i])
      continue;
    const auto f = static_cast<std::size_t>(folds.fold_of(real.keys[i].sentence_id));
    for (std::size_t g = 0; g < layout.size(); ++g)
      (g == f ? layout[g].test : layout[g].train).push_back(static_cast<Eigen::Index>(i));
  }
  for (std::size_t f = 0; f < layout.size(); ++f) {
    if (layout[f].test.size() < 2)
      throw DataError("augmentation fold " + std::to_string(f) + " has fewer than 2 test stimuli");
    if (layout[f].train.size() < 2)
      throw DataError("augmentation fold " + std::to_string(f) + " has fewer than 2 training stimuli");
    for (auto i : layout[f].test)
      if (!real_ids.count(real.keys[static_cast<std::size_t>(i)].sentence_id))
        throw DataError("augmentation: test row is not a real stimulus");
  }

  // Fits one decoder on real training rows (optionally permuted) plus `extra` rows.
  auto run_fold = [&](std::size_t f, const Matrix &Xextra, const Matrix &Yextra,
                      const std::vector<Eigen::Index> *perm, double *lambda) {
    const auto &lf = layout[f];
    const Matrix Xr = real.X(lf.train, Eigen::all);
    Matrix Yr = real.Y(lf.train, Eigen::all);
    if (perm)
      Yr = Matrix(Yr(*perm, Eigen::all));
    EncoderOptions eo;
    eo.grid = opts.fit.grid;
    eo.mode = opts.fit.mode;
    eo.input_stats = fit_normalization(Xr);
    eo.output_stats = fit_normalization(Yr);
    Matrix X(Xr.rows() + Xextra.rows(), Xr.cols());
    Matrix Y(Yr.rows() + Yextra.rows(), Yr.cols());
    X << Xr, Xextra;
    Y << Yr, Yextra;
    if (Xextra.rows() > 0 && opts.synthetic_weight != 1.0) {
      Vector w = Vector::Ones(X.rows());
      w.tail(Xextra.rows()).setConstant(opts.synthetic_weight);
      eo.row_weights = w;
    }
    const auto enc = fit_encoder(X, Y, eo);
    if (lambda)
      *lambda = enc.model.lambda;
    const Matrix pred = encode_normalized(enc.model, real.X(lf.test, Eigen::all));
    const Matrix truth = apply_normalization(*eo.output_stats, Matrix(real.Y(lf.test, Eigen::all)));
    std::vector<std::string> words;
    for (auto i : lf.test)
      words.push_back(real.tokens[static_cast<std::size_t>(i)]);
    return detail::score_pairs(pred, truth, words, opts.exclude_same_word);
  };

  if (!(opts.synthetic_weight > 0))
    throw UsageError("synthetic_weight must be positive");

  AugmentationReport rep;
  rep.selector = opts.selector;
  rep.synthetic_used = static_cast<std::size_t>(Xs.rows());
  rep.folds.resize(layout.size());
  const Matrix none_x(0, real.X.cols()), none_y(0, real.Y.cols());
  parallel_for(layout.size(), opts.fit.threads, [&](std::size_t f) {
    auto &af = rep.folds[f];
    af.fold = static_cast<int>(f);
    af.n_train_real = layout[f].train.size();
    af.n_train_synthetic = static_cast<std::size_t>(Xs.rows());
    af.n_test = layout[f].test.size();
    const auto base = run_fold(f, none_x, none_y, nullptr, &af.baseline_lambda);
    const auto aug = run_fold(f, Xs, Ys, nullptr, &af.augmented_lambda);
    af.pairs = base.second;
    af.baseline_correct = base.first;
    af.augmented_correct = aug.first;
  });
  for (const auto &af : rep.folds) {
    rep.pairs += af.pairs;
    rep.baseline_correct += af.baseline_correct;
    rep.augmented_correct += af.augmented_correct;
  }

  if (opts.n_perm > 0) {
    rep.chance.seed = opts.seed;
    rep.chance.accuracies.assign(opts.n_perm, 0.0);
    parallel_for(opts.n_perm, opts.fit.threads, [&](std::size_t p) {
      auto gen = KeyedRng(opts.seed).with("permutation").with(static_cast<std::uint64_t>(p)).engine();
      std::size_t correct = 0, total = 0;
      for (std::size_t f = 0; f < layout.size(); ++f) {
        std::vector<Eigen::Index> perm(layout[f].train.size());
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        keyed_shuffle(perm, gen);
        const auto r = run_fold(f, none_x, none_y, &perm, nullptr);
        correct += r.first;
        total += r.second;
      }
      rep.chance.accuracies[p] = static_cast<double>(correct) / static_cast<double>(total);
    });
    summarize(rep.chance);
  }
  return rep;
}

inline json to_json(const AugmentationReport &r) {
  json folds = json::array();
  for (const auto &f : r.folds)
    folds.push_back({{"fold", f.fold},
                     {"n_train_real", f.n_train_real},
                     {"n_train_synthetic", f.n_train_synthetic},
                     {"n_test", f.n_test},
                     {"pairs", f.pairs},
                     {"baseline_correct", f.baseline_correct},
                     {"augmented_correct", f.augmented_correct},
                     {"baseline_lambda", f.baseline_lambda},
                     {"augmented_lambda", f.augmented_lambda}});
  return {{"selector", r.selector},
          {"pairs", r.pairs},
          {"baseline_correct", r.baseline_correct},
          {"augmented_correct", r.augmented_correct},
          {"baseline_accuracy", r.baseline_accuracy()},
          {"augmented_accuracy", r.augmented_accuracy()},
          {"synthetic_used", r.synthetic_used},
          {"chance", to_json(r.chance)},
          {"folds", folds}};
}

inline std::string augmentation_csv(const AugmentationReport &r) {
  std::string out = "series,accuracy,stddev\n";
  out += "baseline," + format_fixed(r.baseline_accuracy()) + ",\n";
  out += "augmented," + format_fixed(r.augmented_accuracy()) + ",\n";
  out += "chance," + format_fixed(r.chance.mean) + "," + format_fixed(r.chance.stddev) + "\n";
  return out;
}

// ---------------------------------------------------------------------------

struct LayerRank {
  std::string model_id;
  std::string layer_id;
  double accuracy = 0.0;
};

/// Orders feature matrices by macro (all stimuli, whole head) accuracy, best first; ties keep
/// name order.
inline std::vector<LayerRank> rank_layers(const std::vector<FeatureMatrix> &candidates,
                                          const std::vector<BrainResponse> &responses,
                                          const std::vector<SentenceStimulus> &stimuli, const FoldSpec &folds,
                                          const EvalOptions &opts = {}) {
  std::vector<LayerRank> out;
  for (const auto &fm : candidates) {
    const auto r = cross_validated_eval(fm, responses, stimuli, folds, SubsetFilter{}, opts);
    out.push_back({fm.model_id, fm.layer_id, r.accuracy()});
  }
  std::stable_sort(out.begin(), out.end(), [](const LayerRank &a, const LayerRank &b) {
    if (a.accuracy != b.accuracy)
      return a.accuracy > b.accuracy;
    return std::tie(a.model_id, a.layer_id) < std::tie(b.model_id, b.layer_id);
  });
  return out;
}

} // namespace megalign

#endif // MEGALIGN_AUGMENT_HPP
