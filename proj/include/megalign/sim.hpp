#ifndef MEGALIGN_SIM_HPP
#define MEGALIGN_SIM_HPP

// Linear-Gaussian ground truth: response = features * W + intercept + noise.

#include "megalign/features.hpp"
#include "megalign/meg_prep.hpp"

namespace megalign {

struct GroundTruthModel {
  Matrix weights;      // d_in x (sensors * windows)
  RowVector intercept; // sensors * windows
  Eigen::Index sensors = 0;
  Eigen::Index windows = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  Eigen::Index d_in() const { return weights.rows(); }
};

inline GroundTruthModel make_truth(Eigen::Index d_in, Eigen::Index sensors, Eigen::Index windows, std::uint64_t seed,
                                   double noise_sigma = 0.0) {
  if (d_in <= 0 || sensors <= 0 || windows <= 0)
    throw UsageError("make_truth: dimensions must be positive");
  if (!(noise_sigma >= 0))
    throw UsageError("make_truth: noise_sigma must be >= 0");
  GroundTruthModel t;
  t.sensors = sensors;
  t.windows = windows;
  t.noise_sigma = noise_sigma;
  t.seed = seed;
  auto wg = KeyedRng(seed).with("truth-weights").engine();
  t.weights = standard_normal(d_in, sensors * windows, wg);
  auto bg = KeyedRng(seed).with("truth-intercept").engine();
  t.intercept = standard_normal(1, sensors * windows, bg).row(0);
  return t;
}

/// Noise-free responses for every feature row.
inline Matrix true_responses(const GroundTruthModel &truth, const Matrix &features) {
  if (features.cols() != truth.d_in())
    throw DataError("simulate: features have dimension " + std::to_string(features.cols()) + ", truth expects " +
                    std::to_string(truth.d_in()));
  return (features * truth.weights).rowwise() + truth.intercept;
}

/// Responses for `repetitions` presentations of every bound stimulus. Repetitions share the
/// signal; each (stimulus, repetition) draws its own noise stream keyed on the truth seed.
inline std::vector<BrainResponse> simulate(const GroundTruthModel &truth, const FeatureMatrix &features,
                                           int repetitions, double noise_sigma, const std::string &subject = "sim") {
  if (repetitions < 1)
    throw UsageError("simulate: repetitions must be >= 1");
  if (!(noise_sigma >= 0))
    throw UsageError("simulate: noise_sigma must be >= 0");
  const Matrix signal = true_responses(truth, features.rows);
  std::vector<BrainResponse> out;
  out.reserve(static_cast<std::size_t>(features.size() * repetitions));
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    const auto &b = features.bindings[static_cast<std::size_t>(i)];
    for (int r = 1; r <= repetitions; ++r) {
      RowVector v = signal.row(i);
      if (noise_sigma > 0) {
        auto gen = KeyedRng(truth.seed)
                       .with("noise")
                       .with(b.sentence_id)
                       .with(static_cast<std::uint64_t>(b.position))
                       .with(static_cast<std::uint64_t>(r))
                       .engine();
        v += noise_sigma * standard_normal(1, v.size(), gen).row(0);
      }
      BrainResponse br;
      br.subject_id = subject;
      br.sentence_id = b.sentence_id;
      br.position = b.position;
      br.repetition = r;
      br.values = unflatten(v, truth.sensors, truth.windows);
      out.push_back(std::move(br));
    }
  }
  sort_responses(out);
  return out;
}

/// Mean over repetitions per stimulus (repetition 0 in the result).
inline std::vector<BrainResponse> average_responses(const std::vector<BrainResponse> &rs) {
  std::map<StimulusKey, std::pair<Matrix, int>> acc;
  std::map<StimulusKey, std::string> subject;
  std::vector<BrainResponse> sorted = rs;
  sort_responses(sorted);
  for (const auto &r : sorted) {
    auto [it, fresh] = acc.try_emplace(r.key(), Matrix::Zero(r.values.rows(), r.values.cols()), 0);
    it->second.first += r.values;
    it->second.second += 1;
    subject[r.key()] = r.subject_id;
  }
  std::vector<BrainResponse> out;
  for (auto &[k, v] : acc) {
    BrainResponse b;
    b.subject_id = subject[k];
    b.sentence_id = k.sentence_id;
    b.position = k.position;
    b.repetition = 0;
    b.values = v.first / static_cast<double>(v.second);
    out.push_back(std::move(b));
  }
  return out;
}

/// Expands responses into epochs: every window value held constant across its samples, so
/// windowing the epoch returns the response.
inline std::vector<Epoch> responses_to_epochs(const std::vector<BrainResponse> &rs, const RecordingShape &shape) {
  const auto k = static_cast<Eigen::Index>(shape.window_ms * shape.sample_rate / 1000.0);
  if (k < 1)
    throw UsageError("responses_to_epochs: window shorter than one sample");
  std::vector<Epoch> out;
  for (const auto &r : rs) {
    Epoch e;
    e.subject_id = r.subject_id;
    e.sentence_id = r.sentence_id;
    e.position = r.position;
    e.repetition = r.repetition;
    e.sample_rate = shape.sample_rate;
    e.samples.resize(r.values.rows(), r.values.cols() * k);
    for (Eigen::Index s = 0; s < r.values.rows(); ++s)
      for (Eigen::Index w = 0; w < r.values.cols(); ++w)
        e.samples.row(s).segment(w * k, k).setConstant(r.values(s, w));
    out.push_back(std::move(e));
  }
  return out;
}

inline json to_json(const GroundTruthModel &t) {
  return {{"d_in", t.d_in()},        {"sensors", t.sensors}, {"windows", t.windows},
          {"noise_sigma", t.noise_sigma}, {"seed", t.seed}};
}

} // namespace megalign

#endif // MEGALIGN_SIM_HPP
