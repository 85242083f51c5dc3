#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace megalign;
using namespace megalign::testing;

namespace {
FeatureMatrix gaussian_features(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  FeatureMatrix fm;
  fm.model_id = "gauss";
  fm.layer_id = "0";
  fm.rows = randn(n, d, seed, "features");
  for (Eigen::Index i = 0; i < n; ++i)
    fm.bindings.push_back({"s" + std::to_string(i), 0, "w"});
  return fm;
}
} // namespace

TEST(Truth, ShapeAndSeeding) {
  const auto t = make_truth(4, 6, 5, 1);
  EXPECT_EQ(t.weights.rows(), 4);
  EXPECT_EQ(t.weights.cols(), 30);
  EXPECT_EQ(t.intercept.size(), 30);
  EXPECT_EQ(make_truth(4, 6, 5, 1).weights, t.weights);
  EXPECT_NE(make_truth(4, 6, 5, 2).weights, t.weights);
  EXPECT_THROW(make_truth(0, 6, 5, 1), UsageError);
  EXPECT_THROW(make_truth(4, 6, 5, 1, -1.0), UsageError);
}

TEST(Simulate, NoiselessIsExactLinearMap) {
  const auto t = make_truth(5, 3, 2, 4);
  const auto fm = gaussian_features(20, 5, 4);
  const auto rs = simulate(t, fm, 2, 0.0);
  ASSERT_EQ(rs.size(), 40u);
  const Matrix expect = (fm.rows * t.weights).rowwise() + t.intercept;
  for (const auto &r : rs) {
    const auto i = *fm.find(r.key());
    EXPECT_EQ(r.flatten(), expect.row(i));
  }
}

TEST(Simulate, RepetitionsShareSignalAndAverageShrinksNoise) {
  const auto t = make_truth(5, 10, 5, 5);
  const auto fm = gaussian_features(200, 5, 5);
  const auto rs = simulate(t, fm, 10, 1.0);
  const auto avg = average_responses(rs);
  const Matrix signal = true_responses(t, fm.rows);
  double ss = 0;
  Eigen::Index n = 0;
  for (const auto &r : avg) {
    const RowVector e = r.flatten() - signal.row(*fm.find(r.key()));
    ss += e.squaredNorm();
    n += e.size();
    EXPECT_EQ(r.repetition, 0);
  }
  const double sd = std::sqrt(ss / static_cast<double>(n));
  EXPECT_NEAR(sd, 1.0 / std::sqrt(10.0), 0.3 / std::sqrt(10.0));
  // repetitions 1 and 2 of the same stimulus differ only by noise
  EXPECT_NE(rs[0].values, rs[1].values);
  EXPECT_EQ(rs[0].key(), rs[1].key());
}

TEST(Simulate, ZeroFeaturesGiveInterceptPlusNoise) {
  const auto t = make_truth(3, 2, 2, 6);
  auto fm = gaussian_features(50, 3, 6);
  fm.rows.setZero();
  for (const auto &r : simulate(t, fm, 1, 0.0))
    EXPECT_EQ(r.flatten(), t.intercept);
  double mean = 0;
  const auto noisy = simulate(t, fm, 4, 0.5);
  for (const auto &r : noisy)
    mean += (r.flatten() - t.intercept).mean();
  EXPECT_NEAR(mean / static_cast<double>(noisy.size()), 0.0, 0.05);
}

TEST(Simulate, DimensionMismatchAndArguments) {
  const auto t = make_truth(3, 2, 2, 7);
  EXPECT_THROW(simulate(t, gaussian_features(5, 4, 7), 1, 0.0), DataError);
  EXPECT_THROW(simulate(t, gaussian_features(5, 3, 7), 0, 0.0), UsageError);
  EXPECT_THROW(simulate(t, gaussian_features(5, 3, 7), 1, -0.1), UsageError);
}

TEST(Simulate, RecoverWeightsAtSmallestLambda) {
  const auto t = make_truth(10, 4, 5, 8);
  const auto fm = gaussian_features(4000, 10, 8);
  const Matrix Y = true_responses(t, fm.rows);
  const auto m = fit(fm.rows, Y, LambdaGrid().values().front());
  EXPECT_LT(rel_err(m.weights, t.weights), 1e-4);
  EXPECT_LT(rel_err(m.intercept, t.intercept), 1e-4);
}

TEST(Simulate, EpochsWindowBackToResponses) {
  const auto t = make_truth(3, 4, 5, 9);
  const auto fm = gaussian_features(6, 3, 9);
  const auto rs = simulate(t, fm, 2, 0.3);
  RecordingShape shape;
  shape.sensors = 4;
  shape.window_ms = 100;
  shape.epoch_ms = 500;
  shape.sample_rate = 500;
  const auto epochs = responses_to_epochs(rs, shape);
  ASSERT_EQ(epochs.size(), rs.size());
  EXPECT_EQ(epochs[0].samples.cols(), 250);
  for (std::size_t i = 0; i < rs.size(); ++i)
    EXPECT_LT((window_average(epochs[i], 100).values - rs[i].values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Simulate, NoiselessWorldGivesPerfectEval) {
  const auto w = make_world(passact2(), 12, 0.0, 10, 6, 5, 1);
  const auto r = cross_validated_eval(w.features, w.averaged, w.stimuli, make_folds(w.stimuli, 5, 1));
  EXPECT_EQ(r.accuracy(), 1.0);
}
