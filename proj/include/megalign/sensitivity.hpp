#ifndef MEGALIGN_SENSITIVITY_HPP
#define MEGALIGN_SENSITIVITY_HPP

// Micro-context tests: 2v2 scoring restricted to the same candidate word taken from two
// sentences that differ in exactly one earlier word.

#include "megalign/eval.hpp"

namespace megalign {

enum class VariedClass { noun, verb, determiner, adjective };

enum class CandidateRule {
  determiner_after_verb, // first determiner after the (next) main verb
  following_noun         // first noun after the varied word
};

inline std::string to_string(VariedClass v) {
  switch (v) {
  case VariedClass::noun: return "noun";
  case VariedClass::verb: return "verb";
  case VariedClass::determiner: return "det";
  case VariedClass::adjective: return "adj";
  }
  return "noun";
}

inline VariedClass parse_varied_class(const std::string &s) {
  if (s == "noun")
    return VariedClass::noun;
  if (s == "verb")
    return VariedClass::verb;
  if (s == "det" || s == "determiner")
    return VariedClass::determiner;
  if (s == "adj" || s == "adjective")
    return VariedClass::adjective;
  throw UsageError("unknown sensitivity type '" + s + "' (noun|verb|det|adj)");
}

struct SensitivitySpec {
  VariedClass varied = VariedClass::noun;
  CandidateRule rule = CandidateRule::determiner_after_verb;
  int repetition = 1; // responses must come from this single repetition

  static SensitivitySpec for_class(VariedClass v) {
    SensitivitySpec s;
    s.varied = v;
    s.rule = (v == VariedClass::noun || v == VariedClass::verb) ? CandidateRule::determiner_after_verb
                                                                : CandidateRule::following_noun;
    return s;
  }
};

struct SensitivityPair {
  std::string sentence_a;
  std::string sentence_b;
  std::size_t varied_a = 0; // position of the varied (or inserted) word in a
  std::size_t varied_b = 0;
  std::size_t candidate_a = 0;
  std::size_t candidate_b = 0;
  std::string candidate;

  StimulusKey key_a() const { return {sentence_a, candidate_a}; }
  StimulusKey key_b() const { return {sentence_b, candidate_b}; }
};

inline bool in_class(const WordToken &t, VariedClass v) {
  switch (v) {
  case VariedClass::noun: return is_noun_tag(t.pos);
  case VariedClass::verb: return is_main_verb(t);
  case VariedClass::determiner: return is_determiner_tag(t.pos);
  case VariedClass::adjective: return is_adjective_tag(t.pos);
  }
  return false;
}

/// Candidate position for a word varied at `varied`, or nullopt when the rule finds none.
inline std::optional<std::size_t> candidate_position(const SentenceStimulus &s, std::size_t varied,
                                                     CandidateRule rule) {
  const auto &t = s.tokens;
  if (rule == CandidateRule::following_noun) {
    for (std::size_t i = varied + 1; i < t.size(); ++i)
      if (is_noun_tag(t[i].pos))
        return i;
    return std::nullopt;
  }
  std::size_t i = varied;
  if (!is_main_verb(t[i])) {
    ++i;
    while (i < t.size() && !is_main_verb(t[i]))
      ++i;
    if (i == t.size())
      return std::nullopt;
  }
  while (i + 1 < t.size() && is_main_verb(t[i + 1]))
    ++i;
  for (++i; i < t.size(); ++i)
    if (is_determiner_tag(t[i].pos))
      return i;
  return std::nullopt;
}

namespace detail {
inline bool same_text(const SentenceStimulus &a, std::size_t ia, const SentenceStimulus &b, std::size_t ib,
                      std::size_t len) {
  for (std::size_t k = 0; k < len; ++k)
    if (a.tokens[ia + k].text != b.tokens[ib + k].text)
      return false;
  return true;
}

inline std::size_t first_difference(const SentenceStimulus &a, const SentenceStimulus &b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t d = 0;
  while (d < n && a.tokens[d].text == b.tokens[d].text)
    ++d;
  return d;
}

inline std::optional<SensitivityPair> substitution_pair(const SentenceStimulus &a, const SentenceStimulus &b,
                                                        const SensitivitySpec &spec) {
  const auto d = first_difference(a, b);
  if (d >= std::min(a.size(), b.size()))
    return std::nullopt;
  if (!in_class(a.tokens[d], spec.varied) || !in_class(b.tokens[d], spec.varied))
    return std::nullopt;
  const auto ca = candidate_position(a, d, spec.rule);
  const auto cb = candidate_position(b, d, spec.rule);
  if (!ca || !cb || *ca != *cb)
    return std::nullopt;
  if (!same_text(a, d + 1, b, d + 1, *ca - d))
    return std::nullopt;
  return SensitivityPair{a.sentence_id, b.sentence_id, d, d, *ca, *cb, a.tokens[*ca].text};
}

/// `longer` carries an inserted adjective at the first difference; the rest of the prefix up to
/// the candidate lines up after shifting by one.
inline std::optional<SensitivityPair> insertion_pair(const SentenceStimulus &longer, const SentenceStimulus &shorter,
                                                     const SensitivitySpec &spec) {
  const auto d = first_difference(longer, shorter);
  if (d >= longer.size() || !in_class(longer.tokens[d], spec.varied))
    return std::nullopt;
  const auto cl = candidate_position(longer, d, spec.rule);
  if (!cl || *cl < d + 1)
    return std::nullopt;
  const auto cs = *cl - 1;
  if (cs >= shorter.size() || cs < d)
    return std::nullopt;
  if (!same_text(longer, d + 1, shorter, d, *cl - d))
    return std::nullopt;
  SensitivityPair p;
  p.sentence_a = longer.sentence_id;
  p.sentence_b = shorter.sentence_id;
  p.varied_a = d;
  p.varied_b = d;
  p.candidate_a = *cl;
  p.candidate_b = cs;
  p.candidate = longer.tokens[*cl].text;
  return p;
}
} // namespace detail

/// All matched pairs for a SensitivitySpec, ordered by (sentence_a, sentence_b) with a < b.
inline std::vector<SensitivityPair> enumerate_pairs(const std::vector<SentenceStimulus> &stimuli,
                                                    const SensitivitySpec &spec) {
  std::vector<const SentenceStimulus *> sorted;
  for (const auto &s : stimuli)
    sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto *x, const auto *y) { return x->sentence_id < y->sentence_id; });
  std::vector<SensitivityPair> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const auto &a = *sorted[i];
      const auto &b = *sorted[j];
      if (spec.varied != VariedClass::adjective) {
        if (auto p = detail::substitution_pair(a, b, spec))
          out.push_back(*p);
        continue;
      }
      auto p = detail::insertion_pair(a, b, spec);
      if (!p) {
        p = detail::insertion_pair(b, a, spec);
        if (p) {
          std::swap(p->sentence_a, p->sentence_b);
          std::swap(p->candidate_a, p->candidate_b);
          std::swap(p->varied_a, p->varied_b);
        }
      }
      if (p)
        out.push_back(*p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sign agreement

struct AgreementMap {
  Matrix values; // sensors x windows, entries in [-1, 1]
  std::size_t examples = 0;
};

/// Per element: sign(true) where sign(pred) == sign(true), else 0; averaged over rows.
/// sign(0) counts as +1.
inline AgreementMap agreement_map(const Matrix &pred, const Matrix &truth, Eigen::Index sensors,
                                  Eigen::Index windows) {
  if (pred.rows() == 0)
    throw DataError("agreement_map: empty input");
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw DataError("agreement_map: predictions and responses differ in shape");
  if (pred.cols() != sensors * windows)
    throw DataError("agreement_map: row length does not match sensors x windows");
  Matrix sum = Matrix::Zero(sensors, windows);
  for (Eigen::Index r = 0; r < pred.rows(); ++r)
    for (Eigen::Index s = 0; s < sensors; ++s)
      for (Eigen::Index w = 0; w < windows; ++w) {
        const Eigen::Index c = s * windows + w;
        const bool pp = pred(r, c) >= 0.0;
        const bool tp = truth(r, c) >= 0.0;
        if (pp == tp)
          sum(s, w) += tp ? 1.0 : -1.0;
      }
  return {sum / static_cast<double>(pred.rows()), static_cast<std::size_t>(pred.rows())};
}

/// Example-weighted mean of per-fold maps.
inline AgreementMap pool_maps(const std::vector<AgreementMap> &maps) {
  AgreementMap out;
  for (const auto &m : maps) {
    if (m.examples == 0)
      continue;
    if (out.examples == 0)
      out.values = Matrix::Zero(m.values.rows(), m.values.cols());
    out.values += m.values * static_cast<double>(m.examples);
    out.examples += m.examples;
  }
  if (out.examples == 0)
    throw DataError("pool_maps: no examples");
  out.values /= static_cast<double>(out.examples);
  return out;
}

inline std::string agreement_csv(const AgreementMap &m) {
  std::string out = "sensor";
  for (Eigen::Index w = 0; w < m.values.cols(); ++w)
    out += ",w" + std::to_string(w);
  out += "\n";
  for (Eigen::Index s = 0; s < m.values.rows(); ++s) {
    out += std::to_string(s);
    for (Eigen::Index w = 0; w < m.values.cols(); ++w)
      out += "," + format_fixed(m.values(s, w));
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

struct SensitivityResult {
  EvalResult eval;
  AgreementMap pooled;
  std::vector<AgreementMap> fold_maps;
  std::vector<bool> pair_scored;  // per input pair: both members fell in one test fold
  std::vector<bool> pair_correct; // meaningful where pair_scored
};

/// Keeps responses of the requested repetition; repetition-averaged responses are refused.
inline std::vector<BrainResponse> sensitivity_responses(const std::vector<BrainResponse> &responses,
                                                        const SensitivitySpec &spec) {
  for (const auto &r : responses)
    if (r.repetition == 0)
      throw DataError("sensitivity tests need single-repetition responses; stimulus " + to_string(r.key()) +
                      " is repetition-averaged");
  auto out = select_repetition(responses, spec.repetition);
  if (out.empty())
    throw DataError("no responses from repetition " + std::to_string(spec.repetition));
  return out;
}

/// Trains on every word of the training folds and scores only the enumerated pairs whose two
/// sentences share a test fold.
inline SensitivityResult run_sensitivity(const FeatureMatrix &features, const std::vector<BrainResponse> &responses,
                                         const std::vector<SensitivityPair> &pairs, const FoldSpec &folds,
                                         const SensitivitySpec &spec, const FitOptions &opts = {}) {
  if (pairs.empty())
    throw DataError("run_sensitivity: empty pair list");
  const auto rep = sensitivity_responses(responses, spec);
  const auto d = align(features, rep);
  const auto outs = fit_predict_folds(d, folds, opts);

  SensitivityResult res;
  res.eval.model_id = features.model_id;
  res.eval.layer_id = features.layer_id;
  res.eval.subset = "sensitivity-" + to_string(spec.varied);
  res.pair_scored.assign(pairs.size(), false);
  res.pair_correct.assign(pairs.size(), false);
  for (const auto &fo : outs) {
    std::map<Eigen::Index, Eigen::Index> local; // data row -> test row
    for (std::size_t t = 0; t < fo.test.size(); ++t)
      local[fo.test[t]] = static_cast<Eigen::Index>(t);
    std::vector<IndexPair> scored;
    std::vector<std::size_t> which;
    std::set<Eigen::Index> examples;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto ia = d.index_of(pairs[p].key_a());
      const auto ib = d.index_of(pairs[p].key_b());
      if (!ia || !ib)
        throw DataError("sensitivity pair " + pairs[p].sentence_a + "/" + pairs[p].sentence_b +
                        " has no feature row or response");
      auto la = local.find(*ia);
      auto lb = local.find(*ib);
      if (la == local.end() || lb == local.end())
        continue;
      scored.emplace_back(la->second, lb->second);
      which.push_back(p);
      examples.insert(la->second);
      examples.insert(lb->second);
    }
    FoldScore fs{fo.fold, fo.train.size(), examples.size(), 0, 0, fo.lambda};
    if (!scored.empty()) {
      const auto pr = pairwise_accuracy(fo.pred, fo.truth, scored);
      fs.correct = pr.correct;
      fs.total = pr.total;
      for (std::size_t q = 0; q < which.size(); ++q) {
        res.pair_scored[which[q]] = true;
        res.pair_correct[which[q]] = pr.outcomes[q];
      }
      const std::vector<Eigen::Index> rows(examples.begin(), examples.end());
      res.fold_maps.push_back(agreement_map(fo.pred(rows, Eigen::all),
                                            fo.truth(rows, Eigen::all), d.sensors, d.windows));
    }
    res.eval.correct += fs.correct;
    res.eval.total += fs.total;
    res.eval.folds.push_back(fs);
  }
  if (res.eval.total == 0)
    throw DataError("run_sensitivity: no pair has both sentences in the same test fold");
  res.pooled = pool_maps(res.fold_maps);
  return res;
}

inline json to_json(const SensitivityPair &p) {
  return {{"sentence_a", p.sentence_a},   {"sentence_b", p.sentence_b},   {"varied_a", p.varied_a},
          {"varied_b", p.varied_b},       {"candidate_a", p.candidate_a}, {"candidate_b", p.candidate_b},
          {"candidate", p.candidate}};
}

} // namespace megalign

#endif // MEGALIGN_SENSITIVITY_HPP
