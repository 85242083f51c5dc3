#ifndef MEGALIGN_RIDGE_HPP
#define MEGALIGN_RIDGE_HPP

// Ridge regression with generalized cross-validation (GCV) for the penalty.
//
// For column-centered design Xc = U S V^T (thin SVD) and penalty lambda, the fitted values are
// U diag(s^2 / (s^2 + lambda)) U^T Yc, so every grid point costs one diagonal rescale after a
// single factorization. With an intercept the hat matrix gains the 11^T/n term and its trace
// grows by one.

#include "megalign/meg_prep.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <optional>

namespace megalign {

/// Strictly positive, strictly increasing candidate penalties.
class LambdaGrid {
public:
  LambdaGrid() : values_{0.1, 1.0, 10.0, 100.0, 1000.0} {}
  explicit LambdaGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty())
      throw UsageError("lambda grid is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0) || !std::isfinite(values_[i]))
        throw UsageError("lambda grid values must be positive and finite");
      if (i > 0 && !(values_[i] > values_[i - 1]))
        throw UsageError("lambda grid must be strictly increasing");
    }
  }

  std::vector<double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

private:
  std::vector<double> values_;
};

struct RidgeOptions {
  bool fit_intercept = true;
};

struct RidgeModel {
  Matrix weights;      // D_in x D_out
  RowVector intercept; // D_out
  double lambda = 1.0;
  std::vector<double> target_lambdas; // per-output penalties when selected per target; else empty
  std::optional<NormalizationStats> input_norm;
  std::optional<NormalizationStats> output_norm;

  Eigen::Index d_in() const { return weights.rows(); }
  Eigen::Index d_out() const { return weights.cols(); }
};

struct GcvReport {
  std::vector<double> lambdas;
  std::vector<double> scores;  // mean GCV over targets, per lambda
  std::vector<double> dof;     // tr(A(lambda)) of the penalized part
  std::size_t selected_index = 0;
  double selected_lambda = 0.0;
};

namespace detail {
inline void check_design(const Matrix &X, const Matrix &Y) {
  if (X.rows() < 1)
    throw DataError("ridge: need at least one sample");
  if (X.rows() != Y.rows())
    throw DataError("ridge: X has " + std::to_string(X.rows()) + " rows but Y has " + std::to_string(Y.rows()));
  if (!X.allFinite() || !Y.allFinite())
    throw DataError("ridge: inputs contain NaN or Inf");
}

inline void check_lambda(double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw UsageError("ridge: lambda must be positive and finite");
}
} // namespace detail

/// One SVD of the (optionally weighted, centered) design, reusable across penalties.
class RidgeFactorization {
public:
  RidgeFactorization(const Matrix &X, const Matrix &Y, RidgeOptions opts = {}, const Vector *row_weights = nullptr)
      : opts_(opts) {
    detail::check_design(X, Y);
    const auto n = X.rows();
    Vector w = Vector::Ones(n);
    if (row_weights) {
      if (row_weights->size() != n || !(row_weights->array() > 0).all())
        throw DataError("ridge: row weights must be positive, one per sample");
      w = *row_weights;
    }
    if (opts_.fit_intercept) {
      const double wsum = w.sum();
      x_mean_ = (w.transpose() * X) / wsum;
      y_mean_ = (w.transpose() * Y) / wsum;
    } else {
      x_mean_ = RowVector::Zero(X.cols());
      y_mean_ = RowVector::Zero(Y.cols());
    }
    const Vector sw = w.array().sqrt();
    Matrix Xc = X.rowwise() - x_mean_;
    yc_ = Y.rowwise() - y_mean_;
    if (row_weights) {
      Xc = sw.asDiagonal() * Xc;
      yc_ = sw.asDiagonal() * yc_;
    }
    Eigen::BDCSVD<Matrix> svd(Xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u_ = svd.matrixU();
    v_ = svd.matrixV();
    s_ = svd.singularValues();
    uty_ = u_.transpose() * yc_;
  }

  Eigen::Index samples() const { return yc_.rows(); }
  Eigen::Index targets() const { return yc_.cols(); }
  const Vector &singular_values() const { return s_; }

  /// tr(A(lambda)) for the penalized part of the hat matrix.
  double dof(double lambda) const {
    double t = 0.0;
    for (Eigen::Index i = 0; i < s_.size(); ++i)
      t += s_(i) * s_(i) / (s_(i) * s_(i) + lambda);
    return t;
  }

  /// tr(I - H): hat matrix including the intercept projection when fitted.
  double residual_trace(double lambda) const {
    return static_cast<double>(samples()) - (opts_.fit_intercept ? 1.0 : 0.0) - dof(lambda);
  }

  /// Per-target GCV(lambda) = (RSS/n) / (tr(I - H)/n)^2.
  Vector gcv_scores(double lambda) const {
    detail::check_lambda(lambda);
    const double n = static_cast<double>(samples());
    const double tr = residual_trace(lambda);
    if (!(tr > 0))
      throw NumericError("GCV undefined: tr(I - A) = " + std::to_string(tr) + " at lambda " + std::to_string(lambda));
    Vector shrink(s_.size());
    for (Eigen::Index i = 0; i < s_.size(); ++i)
      shrink(i) = s_(i) * s_(i) / (s_(i) * s_(i) + lambda);
    const Matrix fitted = u_ * (shrink.asDiagonal() * uty_);
    const Matrix resid = yc_ - fitted;
    const double denom = (tr / n) * (tr / n);
    Vector out(targets());
    for (Eigen::Index j = 0; j < targets(); ++j)
      out(j) = (resid.col(j).squaredNorm() / n) / denom;
    return out;
  }

  double mean_gcv(double lambda) const { return gcv_scores(lambda).mean(); }

  /// Centered-coordinate weights V diag(s / (s^2 + lambda)) U^T Yc.
  Matrix weights(double lambda) const {
    detail::check_lambda(lambda);
    Vector gain(s_.size());
    for (Eigen::Index i = 0; i < s_.size(); ++i)
      gain(i) = s_(i) / (s_(i) * s_(i) + lambda);
    return v_ * (gain.asDiagonal() * uty_);
  }

  RidgeModel model(double lambda) const {
    RidgeModel m;
    m.lambda = lambda;
    m.weights = weights(lambda);
    m.intercept = y_mean_ - x_mean_ * m.weights;
    return m;
  }

  /// Each output column uses its own penalty.
  RidgeModel model(const std::vector<double> &per_target) const {
    if (static_cast<Eigen::Index>(per_target.size()) != targets())
      throw DataError("ridge: per-target lambda count mismatch");
    RidgeModel m;
    m.weights.resize(v_.rows(), targets());
    for (Eigen::Index j = 0; j < targets(); ++j) {
      Vector gain(s_.size());
      for (Eigen::Index i = 0; i < s_.size(); ++i)
        gain(i) = s_(i) / (s_(i) * s_(i) + per_target[j]);
      m.weights.col(j) = v_ * (gain.asDiagonal() * uty_.col(j));
    }
    m.intercept = y_mean_ - x_mean_ * m.weights;
    m.target_lambdas = per_target;
    double acc = 0;
    for (double l : per_target)
      acc += l;
    m.lambda = acc / static_cast<double>(per_target.size());
    return m;
  }

private:
  RidgeOptions opts_;
  RowVector x_mean_, y_mean_;
  Matrix yc_, u_, v_, uty_;
  Vector s_;
};

/// Solves (Xc^T Xc + lambda I) W = Xc^T Yc; the intercept restores the column means.
inline RidgeModel fit(const Matrix &X, const Matrix &Y, double lambda, RidgeOptions opts = {}) {
  detail::check_lambda(lambda);
  return RidgeFactorization(X, Y, opts).model(lambda);
}

inline double gcv_score(const Matrix &X, const Vector &y, double lambda, RidgeOptions opts = {}) {
  return RidgeFactorization(X, Matrix(y), opts).gcv_scores(lambda)(0);
}

namespace detail {
inline GcvReport pick(const RidgeFactorization &f, const LambdaGrid &grid) {
  GcvReport rep;
  rep.lambdas = grid.values();
  rep.scores.resize(grid.size());
  rep.dof.resize(grid.size());
  bool any = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lam = grid.values()[i];
    rep.dof[i] = f.dof(lam);
    double score = std::numeric_limits<double>::quiet_NaN();
    try {
      score = f.mean_gcv(lam);
    } catch (const NumericError &) {
    }
    rep.scores[i] = score;
    // strict '<' keeps the smallest lambda on ties
    if (std::isfinite(score) && (!any || score < best)) {
      best = score;
      rep.selected_index = i;
      any = true;
    }
  }
  if (!any)
    throw NumericError("GCV: no finite score on the lambda grid");
  rep.selected_lambda = grid.values()[rep.selected_index];
  return rep;
}
} // namespace detail

/// One shared lambda minimizing the mean GCV score over all targets.
inline GcvReport select_lambda(const Matrix &X, const Matrix &Y, const LambdaGrid &grid, RidgeOptions opts = {}) {
  return detail::pick(RidgeFactorization(X, Y, opts), grid);
}

/// Y_hat = X W + intercept.
inline Matrix predict(const RidgeModel &model, const Matrix &X) {
  if (X.cols() != model.d_in())
    throw DataError("predict: X has " + std::to_string(X.cols()) + " columns, model expects " +
                    std::to_string(model.d_in()));
  return (X * model.weights).rowwise() + model.intercept;
}

// ---------------------------------------------------------------------------
// Encoder pipeline: z-score inputs/outputs on the training data, pick lambda by GCV, fit.

enum class LambdaMode { shared, per_target };

struct EncoderOptions {
  LambdaGrid grid;
  LambdaMode mode = LambdaMode::shared;
  RidgeOptions ridge;
  bool normalize_inputs = true;
  bool normalize_outputs = true;
  std::optional<NormalizationStats> input_stats;  // overrides fitting on X
  std::optional<NormalizationStats> output_stats; // overrides fitting on Y
  std::optional<Vector> row_weights;
};

struct EncoderFit {
  RidgeModel model;
  GcvReport gcv;
};

inline EncoderFit fit_encoder(const Matrix &X, const Matrix &Y, const EncoderOptions &opts = {}) {
  detail::check_design(X, Y);
  std::optional<NormalizationStats> in_st, out_st;
  if (opts.normalize_inputs)
    in_st = opts.input_stats ? *opts.input_stats : fit_normalization(X);
  if (opts.normalize_outputs)
    out_st = opts.output_stats ? *opts.output_stats : fit_normalization(Y);
  const Matrix Xn = in_st ? apply_normalization(*in_st, X) : X;
  const Matrix Yn = out_st ? apply_normalization(*out_st, Y) : Y;
  const Vector *w = opts.row_weights ? &*opts.row_weights : nullptr;
  RidgeFactorization f(Xn, Yn, opts.ridge, w);
  EncoderFit out;
  out.gcv = detail::pick(f, opts.grid);
  if (opts.mode == LambdaMode::shared) {
    out.model = f.model(out.gcv.selected_lambda);
  } else {
    std::vector<double> per(static_cast<std::size_t>(f.targets()));
    std::vector<double> best(per.size(), std::numeric_limits<double>::infinity());
    for (double lam : opts.grid.values()) {
      const Vector sc = f.gcv_scores(lam);
      for (std::size_t j = 0; j < per.size(); ++j)
        if (sc(static_cast<Eigen::Index>(j)) < best[j]) {
          best[j] = sc(static_cast<Eigen::Index>(j));
          per[j] = lam;
        }
    }
    out.model = f.model(per);
  }
  out.model.input_norm = in_st;
  out.model.output_norm = out_st;
  return out;
}

/// Predictions in the model's normalized output space (inputs given in raw units).
inline Matrix encode_normalized(const RidgeModel &model, const Matrix &X) {
  return predict(model, model.input_norm ? apply_normalization(*model.input_norm, X) : X);
}

/// Predictions in raw response units.
inline Matrix encode(const RidgeModel &model, const Matrix &X) {
  const Matrix z = encode_normalized(model, X);
  return model.output_norm ? invert_normalization(*model.output_norm, z) : z;
}

inline json to_json(const GcvReport &r) {
  return {{"lambdas", r.lambdas},
          {"scores", r.scores},
          {"dof", r.dof},
          {"selected_index", r.selected_index},
          {"selected_lambda", r.selected_lambda}};
}

// ---------------------------------------------------------------------------
// Serialization: model.json + weights.f32 (binary32 little-endian, row-major).

inline void save_model(const fs::path &dir, const RidgeModel &m, const json &extra = json()) {
  fs::create_directories(dir);
  write_f32le(dir / "weights.f32", m.weights);
  json j;
  j["format_version"] = 1;
  j["d_in"] = m.d_in();
  j["d_out"] = m.d_out();
  j["lambda"] = m.lambda;
  if (!m.target_lambdas.empty())
    j["target_lambdas"] = m.target_lambdas;
  j["weights"] = {{"payload", "weights.f32"}, {"rows", m.d_in()}, {"cols", m.d_out()},
                  {"dtype", "f32le"}, {"layout", "row-major"}};
  j["intercept"] = std::vector<double>(m.intercept.data(), m.intercept.data() + m.intercept.size());
  if (m.input_norm)
    j["input_norm"] = to_json(*m.input_norm);
  if (m.output_norm)
    j["output_norm"] = to_json(*m.output_norm);
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it)
      j[it.key()] = it.value();
  write_json_file(dir / "model.json", j);
}

inline RidgeModel load_model(const fs::path &dir, json *manifest_out = nullptr) {
  const json j = read_json_file(dir / "model.json");
  RidgeModel m;
  try {
    const auto rows = j.at("d_in").get<Eigen::Index>();
    const auto cols = j.at("d_out").get<Eigen::Index>();
    m.lambda = j.at("lambda").get<double>();
    if (j.contains("target_lambdas"))
      m.target_lambdas = j.at("target_lambdas").get<std::vector<double>>();
    m.weights = read_f32le(dir / j.at("weights").at("payload").get<std::string>(), rows, cols);
    const auto b = j.at("intercept").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(b.size()) != cols)
      throw DataError("model.json: intercept length " + std::to_string(b.size()) + " != d_out");
    m.intercept = Eigen::Map<const RowVector>(b.data(), cols);
    if (j.contains("input_norm"))
      m.input_norm = normalization_from_json(j.at("input_norm"));
    if (j.contains("output_norm"))
      m.output_norm = normalization_from_json(j.at("output_norm"));
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed model.json: ") + e.what());
  }
  if (!(m.lambda > 0))
    throw DataError("model.json: lambda must be positive");
  if (!m.intercept.allFinite())
    throw DataError("model.json: non-finite intercept");
  if (manifest_out)
    *manifest_out = j;
  return m;
}

} // namespace megalign

#endif // MEGALIGN_RIDGE_HPP
