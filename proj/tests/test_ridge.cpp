#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace megalign;
using namespace megalign::testing;

TEST(Ridge, MatchesNormalEquationsAcrossGrid) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix X = randn(20, 8, seed, "x");
    const Matrix Y = randn(20, 3, seed, "y");
    for (double lam : LambdaGrid().values()) {
      const auto m = fit(X, Y, lam);
      const auto [W, b] = ridge_normal_equations(X, Y, lam);
      EXPECT_LT(rel_err(m.weights, W), 1e-10);
      EXPECT_LT(rel_err(m.intercept, b), 1e-10);
    }
  }
}

TEST(Ridge, ApproachesOlsAsLambdaVanishes) {
  const Matrix X = randn(40, 6, 3, "x");
  const Matrix Y = randn(40, 2, 3, "y");
  const auto m = fit(X, Y, 1e-12);
  const auto [W, b] = ols_pinv(X, Y);
  EXPECT_LT(rel_err(m.weights, W), 1e-6);
  EXPECT_LT(rel_err(m.intercept, b), 1e-6);
}

TEST(Ridge, WideDesignStillSolvable) {
  const Matrix X = randn(10, 30, 4, "x");
  const Matrix Y = randn(10, 2, 4, "y");
  const auto m = fit(X, Y, 1.0);
  const auto [W, b] = ridge_normal_equations(X, Y, 1.0);
  EXPECT_LT(rel_err(m.weights, W), 1e-9);
}

TEST(Ridge, NoInterceptOption) {
  const Matrix X = randn(15, 4, 5, "x");
  const Matrix Y = randn(15, 2, 5, "y");
  RidgeOptions o;
  o.fit_intercept = false;
  const auto m = fit(X, Y, 2.0, o);
  Matrix A = X.transpose() * X;
  A.diagonal().array() += 2.0;
  const Matrix W = A.ldlt().solve(X.transpose() * Y);
  EXPECT_LT(rel_err(m.weights, W), 1e-10);
  EXPECT_EQ(m.intercept.norm(), 0.0);
}

TEST(Ridge, RowWeightsMatchReplication) {
  // weight 2 on a row equals duplicating it
  const Matrix X = randn(12, 3, 6, "x");
  const Matrix Y = randn(12, 2, 6, "y");
  Vector w = Vector::Ones(12);
  w(0) = 2.0;
  const auto weighted = RidgeFactorization(X, Y, {}, &w).model(1.0);
  Matrix X2(13, 3), Y2(13, 2);
  X2 << X, X.row(0);
  Y2 << Y, Y.row(0);
  const auto dup = fit(X2, Y2, 1.0);
  EXPECT_LT(rel_err(weighted.weights, dup.weights), 1e-10);
  EXPECT_LT(rel_err(weighted.intercept, dup.intercept), 1e-10);
}

TEST(Gcv, SvdPathEqualsDenseHatMatrix) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix X = randn(25, 7, seed, "x");
    const Vector y = randn(25, 1, seed, "y").col(0);
    for (double lam : {1e-3, 0.1, 1.0, 10.0, 1000.0})
      EXPECT_NEAR(gcv_score(X, y, lam) / gcv_dense(X, y, lam), 1.0, 1e-10);
  }
}

TEST(Gcv, ResponseInNullSpaceOfDesign) {
  // y orthogonal to the centered columns: residual is y itself, only tr(I - A) moves with lambda
  const Matrix X = randn(30, 4, 9, "x");
  const Matrix Xc = X.rowwise() - X.colwise().mean();
  Vector y = randn(30, 1, 9, "y").col(0);
  y.array() -= y.mean();
  y -= Xc * Xc.colPivHouseholderQr().solve(y);
  ASSERT_LT((Xc.transpose() * y).norm(), 1e-10);
  for (double lam : LambdaGrid().values()) {
    const double got = gcv_score(X, y, lam);
    EXPECT_NEAR(got / gcv_dense(X, y, lam), 1.0, 1e-10);
    RidgeFactorization f(X, Matrix(y));
    const double tr = f.residual_trace(lam);
    EXPECT_NEAR(got, 30.0 * y.squaredNorm() / (tr * tr), 1e-10 * got);
  }
}

TEST(Gcv, FullInterpolationIsNumericError) {
  // n = 3 with 2 free directions plus intercept leaves tr(I - H) -> 0 for tiny lambda
  const Matrix X = randn(3, 5, 1, "x");
  const Vector y = randn(3, 1, 1, "y").col(0);
  EXPECT_THROW(gcv_score(X, y, 1e-300), NumericError);
}

TEST(Gcv, TiesPickSmallestLambda) {
  // constant target: every lambda has zero residual -> tie
  const Matrix X = randn(10, 2, 2, "x");
  const Matrix Y = Matrix::Constant(10, 1, 3.0);
  const auto rep = select_lambda(X, Y, LambdaGrid());
  EXPECT_EQ(rep.selected_index, 0u);
  EXPECT_DOUBLE_EQ(rep.selected_lambda, 0.1);
}

TEST(Gcv, LargeNoisePrefersLargerLambda) {
  const Matrix X = randn(40, 10, 5, "x");
  const Matrix W = randn(10, 20, 5, "w");
  const Matrix E = randn(40, 20, 5, "e");
  const auto clean = select_lambda(X, X * W, LambdaGrid());
  const auto noisy = select_lambda(X, X * W * 0.01 + E * 10.0, LambdaGrid());
  EXPECT_LE(clean.selected_lambda, noisy.selected_lambda);
  EXPECT_EQ(noisy.selected_lambda, 1000.0);
}

TEST(Ridge, GridValidation) {
  EXPECT_THROW(LambdaGrid(std::vector<double>{}), UsageError);
  EXPECT_THROW(LambdaGrid({1.0, -1.0}), UsageError);
  EXPECT_THROW(LambdaGrid({1.0, 1.0}), UsageError);
  EXPECT_THROW(fit(Matrix::Ones(3, 2), Matrix::Ones(3, 1), 0.0), UsageError);
}

TEST(Ridge, DimensionAndFiniteChecks) {
  EXPECT_THROW(fit(Matrix::Ones(3, 2), Matrix::Ones(4, 1), 1.0), DataError);
  Matrix X = Matrix::Ones(3, 2);
  X(0, 0) = std::nan("");
  EXPECT_THROW(fit(X, Matrix::Ones(3, 1), 1.0), DataError);
  const auto m = fit(randn(5, 2, 1), randn(5, 1, 2), 1.0);
  EXPECT_THROW(predict(m, Matrix::Ones(2, 3)), DataError);
}

TEST(Ridge, PerTargetLambdaPicksEachColumnsMinimum) {
  const Matrix X = randn(30, 5, 8, "x");
  Matrix Y(30, 2);
  Y.col(0) = X * randn(5, 1, 8, "w").col(0);
  Y.col(1) = randn(30, 1, 8, "n").col(0) * 10.0;
  EncoderOptions o;
  o.mode = LambdaMode::per_target;
  o.normalize_inputs = o.normalize_outputs = false;
  const auto fitted = fit_encoder(X, Y, o);
  ASSERT_EQ(fitted.model.target_lambdas.size(), 2u);
  RidgeFactorization f(X, Y);
  for (Eigen::Index j = 0; j < 2; ++j) {
    double best = std::numeric_limits<double>::infinity(), arg = 0;
    for (double lam : LambdaGrid().values())
      if (f.gcv_scores(lam)(j) < best) {
        best = f.gcv_scores(lam)(j);
        arg = lam;
      }
    EXPECT_EQ(fitted.model.target_lambdas[static_cast<std::size_t>(j)], arg);
    const auto single = fit(X, Y.col(j), arg);
    EXPECT_LT(rel_err(fitted.model.weights.col(j), single.weights), 1e-10);
  }
}

TEST(Encoder, NormalizedRoundTrip) {
  const Matrix X = randn(50, 4, 3, "x") * 5.0;
  const Matrix W = randn(4, 6, 3, "w");
  const Matrix Y = (X * W).array() + 100.0;
  const auto e = fit_encoder(X, Y);
  EXPECT_LT(rel_err(encode(e.model, X), Y), 1e-2);
}

TEST(Encoder, SaveLoadPreservesPredictionsToSinglePrecision) {
  TempDir tmp("model");
  const Matrix X = randn(30, 4, 3, "x");
  const Matrix Y = randn(30, 6, 3, "y");
  const auto e = fit_encoder(X, Y);
  save_model(tmp.path() / "m", e.model, {{"note", "x"}});
  json manifest;
  const auto back = load_model(tmp.path() / "m", &manifest);
  EXPECT_EQ(manifest.at("note"), "x");
  EXPECT_EQ(back.lambda, e.model.lambda);
  EXPECT_LT(rel_err(encode(back, X), encode(e.model, X)), 1e-6);
}
