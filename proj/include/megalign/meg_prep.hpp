#ifndef MEGALIGN_MEG_PREP_HPP
#define MEGALIGN_MEG_PREP_HPP

#include "megalign/core_data.hpp"

#include <cmath>
#include <map>

namespace megalign {

/// Element-wise mean over repetitions of one (subject, sentence, position). Repetitions are
/// summed in ascending repetition order, then divided once. The result carries repetition 0.
inline Epoch average_repetitions(std::vector<Epoch> reps) {
  if (reps.empty())
    throw DataError("average_repetitions: no epochs");
  sort_epochs(reps);
  const auto &first = reps.front();
  Matrix sum = Matrix::Zero(first.samples.rows(), first.samples.cols());
  for (const auto &e : reps) {
    if (e.samples.rows() != first.samples.rows() || e.samples.cols() != first.samples.cols())
      throw DataError(detail::describe_entry(e.sentence_id, e.position, e.repetition) + ": shape " +
                      std::to_string(e.samples.rows()) + "x" + std::to_string(e.samples.cols()) +
                      " differs from repetition " + std::to_string(first.repetition));
    if (e.subject_id != first.subject_id || e.sentence_id != first.sentence_id || e.position != first.position)
      throw DataError("average_repetitions: epochs belong to different stimuli");
    sum += e.samples;
  }
  Epoch out = first;
  out.repetition = 0;
  out.samples = sum / static_cast<double>(reps.size());
  return out;
}

/// Groups a collection by (subject, sentence, position) and averages each group.
inline std::vector<Epoch> average_all_repetitions(const std::vector<Epoch> &epochs) {
  std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<Epoch>> groups;
  for (const auto &e : epochs)
    groups[{e.subject_id, e.sentence_id, e.position}].push_back(e);
  std::vector<Epoch> out;
  out.reserve(groups.size());
  for (auto &[key, reps] : groups)
    out.push_back(average_repetitions(std::move(reps)));
  return out;
}

/// Mean over non-overlapping windows of `window_ms`. Column w averages samples
/// [w*k, (w+1)*k) where k is the window sample count.
inline BrainResponse window_average(const Epoch &epoch, double window_ms) {
  if (window_ms <= 0)
    throw DataError("window_average: window_ms must be positive");
  const double k_real = window_ms * epoch.sample_rate / 1000.0;
  if (k_real < 1 || k_real != std::floor(k_real))
    throw DataError("window_average: " + std::to_string(window_ms) + " ms at " + std::to_string(epoch.sample_rate) +
                    " Hz is not a whole number of samples");
  const auto k = static_cast<Eigen::Index>(k_real);
  const auto total = epoch.samples.cols();
  if (total == 0 || total % k != 0)
    throw DataError("window_average: " + detail::describe_entry(epoch.sentence_id, epoch.position, epoch.repetition) +
                    " has " + std::to_string(total) + " samples, not divisible into " + std::to_string(k) +
                    "-sample windows");
  const auto windows = total / k;
  BrainResponse r;
  r.subject_id = epoch.subject_id;
  r.sentence_id = epoch.sentence_id;
  r.position = epoch.position;
  r.repetition = epoch.repetition;
  r.values.resize(epoch.samples.rows(), windows);
  for (Eigen::Index s = 0; s < epoch.samples.rows(); ++s) {
    for (Eigen::Index w = 0; w < windows; ++w) {
      double acc = 0.0;
      for (Eigen::Index t = w * k; t < (w + 1) * k; ++t)
        acc += epoch.samples(s, t);
      r.values(s, w) = acc / static_cast<double>(k);
    }
  }
  return r;
}

/// Per-feature z-scoring statistics fit on a training fold.
struct NormalizationStats {
  RowVector mean;
  RowVector std; // population standard deviation
  RowVector degenerate_mask; // 1 where the feature is constant on the fold

  Eigen::Index size() const { return mean.size(); }
};

/// A feature counts as constant when its spread is below this fraction of its magnitude.
inline constexpr double kDegenerateRelStd = 1e-12;

inline NormalizationStats fit_normalization(const Matrix &train) {
  if (train.rows() < 2)
    throw DataError("fit_normalization: need at least 2 training samples, got " + std::to_string(train.rows()));
  const auto n = static_cast<double>(train.rows());
  NormalizationStats st;
  st.mean = RowVector::Zero(train.cols());
  st.std = RowVector::Zero(train.cols());
  st.degenerate_mask = RowVector::Zero(train.cols());
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < train.rows(); ++i)
      acc += train(i, j);
    const double mu = acc / n;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      const double d = train(i, j) - mu;
      ss += d * d;
    }
    st.mean(j) = mu;
    st.std(j) = std::sqrt(ss / n);
    if (st.std(j) <= kDegenerateRelStd * std::max(1.0, std::abs(mu)))
      st.degenerate_mask(j) = 1.0;
  }
  return st;
}

/// Z-scores rows of `data`; degenerate features map to 0.
inline Matrix apply_normalization(const NormalizationStats &st, const Matrix &data) {
  if (data.cols() != st.size())
    throw DataError("apply_normalization: " + std::to_string(data.cols()) + " features, stats cover " +
                    std::to_string(st.size()));
  Matrix out(data.rows(), data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (st.degenerate_mask(j) != 0.0) {
      out.col(j).setZero();
      continue;
    }
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      out(i, j) = (data(i, j) - st.mean(j)) / st.std(j);
  }
  return out;
}

inline RowVector apply_normalization(const NormalizationStats &st, const RowVector &v) {
  return apply_normalization(st, Matrix(v)).row(0);
}

/// Inverse map; degenerate features return to their training mean.
inline Matrix invert_normalization(const NormalizationStats &st, const Matrix &z) {
  if (z.cols() != st.size())
    throw DataError("invert_normalization: feature count mismatch");
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      out(i, j) = st.degenerate_mask(j) != 0.0 ? st.mean(j) : z(i, j) * st.std(j) + st.mean(j);
  return out;
}

inline json to_json(const NormalizationStats &st) {
  json j;
  j["mean"] = std::vector<double>(st.mean.data(), st.mean.data() + st.mean.size());
  j["std"] = std::vector<double>(st.std.data(), st.std.data() + st.std.size());
  j["degenerate"] = std::vector<double>(st.degenerate_mask.data(), st.degenerate_mask.data() + st.degenerate_mask.size());
  return j;
}

inline NormalizationStats normalization_from_json(const json &j) {
  auto vec = [&](const char *key) {
    const auto v = j.at(key).get<std::vector<double>>();
    return RowVector(Eigen::Map<const RowVector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  NormalizationStats st{vec("mean"), vec("std"), vec("degenerate")};
  if (st.std.size() != st.mean.size() || st.degenerate_mask.size() != st.mean.size())
    throw DataError("normalization stats: vector lengths differ");
  if ((st.std.array() < 0).any())
    throw DataError("normalization stats: negative standard deviation");
  return st;
}

/// How `prep` reduces repetitions before windowing.
enum class RepetitionPolicy { average, first, all };

inline RepetitionPolicy parse_repetition_policy(const std::string &s) {
  if (s == "average")
    return RepetitionPolicy::average;
  if (s == "first")
    return RepetitionPolicy::first;
  if (s == "all")
    return RepetitionPolicy::all;
  throw UsageError("unknown repetition policy '" + s + "' (average|first|all)");
}

/// Epoch collection -> response collection. Each epoch is processed independently.
inline std::vector<BrainResponse> prepare_responses(const std::vector<Epoch> &epochs, double window_ms,
                                                    RepetitionPolicy policy, unsigned threads = 1) {
  std::vector<Epoch> chosen;
  switch (policy) {
  case RepetitionPolicy::average: chosen = average_all_repetitions(epochs); break;
  case RepetitionPolicy::first:
    for (const auto &e : epochs)
      if (e.repetition == 1)
        chosen.push_back(e);
    break;
  case RepetitionPolicy::all: chosen = epochs; break;
  }
  std::vector<BrainResponse> out(chosen.size());
  parallel_for(chosen.size(), threads, [&](std::size_t i) { out[i] = window_average(chosen[i], window_ms); });
  sort_responses(out);
  return out;
}

} // namespace megalign

#endif // MEGALIGN_MEG_PREP_HPP
