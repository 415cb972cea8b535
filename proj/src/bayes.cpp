#include "fxga/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fxga/error.hpp"

namespace fxga {

FittedNaiveBayes::FittedNaiveBayes(ClassConditionalStats stats) : stats_(std::move(stats)) {
  const std::size_t n = stats_.mean[0].size();
  if (n == 0) fail(ErrorCode::EmptyInput, "model needs at least one feature");
  for (int y = 0; y < 2; ++y) {
    const auto c = static_cast<std::size_t>(y);
    if (stats_.mean[c].size() != n || stats_.variance[c].size() != n)
      fail(ErrorCode::DimensionMismatch, "class statistics disagree on feature count");
    if (!(stats_.prior[c] > 0.0)) fail(ErrorCode::SingleClassData, "class prior must be > 0");
    log_prior_[c] = std::log(stats_.prior[c]);
    log_norm_[c].resize(n);
    inv_two_var_[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double var = stats_.variance[c][i];
      if (!(var > 0.0)) fail(ErrorCode::EmptyInput, "variance must be > 0");
      log_norm_[c][i] = -0.5 * std::log(2.0 * std::numbers::pi * var);
      inv_two_var_[c][i] = 1.0 / (2.0 * var);
    }
  }
}

double FittedNaiveBayes::log_joint(std::span<const double> x, int y) const {
  if (x.size() != n_features())
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(n_features()) + " features, got " +
                                           std::to_string(x.size()));
  const auto c = static_cast<std::size_t>(y);
  const auto& mu = stats_.mean[c];
  double acc = log_prior_[c];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mu[i];
    acc += log_norm_[c][i] - d * d * inv_two_var_[c][i];
  }
  return acc;
}

double FittedNaiveBayes::posterior(std::span<const double> x) const {
  const double l0 = log_joint(x, 0);
  const double l1 = log_joint(x, 1);
  const double m = std::max(l0, l1);
  const double e0 = std::exp(l0 - m);
  const double e1 = std::exp(l1 - m);
  return e1 / (e0 + e1);
}

FittedNaiveBayes fit(const Matrix& x, std::span<const int> labels) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit(x, labels, rows);
}

FittedNaiveBayes fit(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows) {
  if (rows.empty() || x.cols() == 0) fail(ErrorCode::EmptyInput, "no training rows");
  if (labels.size() != x.rows()) fail(ErrorCode::DimensionMismatch, "labels and rows differ in length");
  const std::size_t d = x.cols();

  std::array<std::size_t, 2> count{0, 0};
  std::array<std::vector<double>, 2> mean{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  std::vector<double> global_mean(d, 0.0);
  for (std::size_t r : rows) {
    const int y = labels[r];
    if (y != 0 && y != 1) fail(ErrorCode::EmptyInput, "labels must be 0 or 1");
    const auto c = static_cast<std::size_t>(y);
    ++count[c];
    const auto row = x.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(row[i])) fail(ErrorCode::EmptyInput, "non-finite feature value");
      mean[c][i] += row[i];
      global_mean[i] += row[i];
    }
  }
  if (count[0] < 2 || count[1] < 2)
    fail(ErrorCode::SingleClassData, "need at least two samples of each class (got " + std::to_string(count[0]) +
                                         " / " + std::to_string(count[1]) + ")");
  for (std::size_t c = 0; c < 2; ++c)
    for (double& m : mean[c]) m /= static_cast<double>(count[c]);
  for (double& m : global_mean) m /= static_cast<double>(rows.size());

  std::array<std::vector<double>, 2> var{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  std::vector<double> global_var(d, 0.0);
  for (std::size_t r : rows) {
    const auto c = static_cast<std::size_t>(labels[r]);
    const auto row = x.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double dc = row[i] - mean[c][i];
      const double dg = row[i] - global_mean[i];
      var[c][i] += dc * dc;
      global_var[i] += dg * dg;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    global_var[i] /= static_cast<double>(rows.size());
    const double floor = 1e-9 * (global_var[i] + 1e-12);
    for (std::size_t c = 0; c < 2; ++c) var[c][i] = std::max(var[c][i] / static_cast<double>(count[c]), floor);
  }

  ClassConditionalStats stats;
  const auto total = static_cast<double>(rows.size());
  stats.prior = {static_cast<double>(count[0]) / total, static_cast<double>(count[1]) / total};
  stats.mean = std::move(mean);
  stats.variance = std::move(var);
  return FittedNaiveBayes(std::move(stats));
}

double posterior(const FittedNaiveBayes& model, std::span<const double> x) { return model.posterior(x); }

Prediction decide(double posterior, double p_rejection) {
  const double winning = std::max(posterior, 1.0 - posterior);
  if (!(winning > p_rejection)) return {Decision::Rejected, posterior};
  return {posterior > 0.5 ? Decision::Class1 : Decision::Class0, posterior};
}

RejectionModel make_rejection_model(FittedNaiveBayes model, double p_rejection) {
  if (!(p_rejection >= 0.5 && p_rejection < 1.0)) fail(ErrorCode::InvalidConfig, "p_rejection must lie in [0.5, 1)");
  return RejectionModel{std::move(model), p_rejection, 0.0, false};
}

Prediction predict_with_rejection(const RejectionModel& model, std::span<const double> x) {
  return decide(model.model.posterior(x), model.p_rejection);
}

double rejection_threshold(std::vector<double> values, double acceptance) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "no calibration values");
  if (!(acceptance > 0.0 && acceptance < 1.0)) fail(ErrorCode::InvalidConfig, "acceptance target must lie in (0, 1)");
  std::sort(values.begin(), values.end());
  const double pos = (1.0 - acceptance) * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const std::size_t upper = std::min(lower + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lower);
  const double q = frac == 0.0 ? values[lower] : values[lower] + frac * (values[upper] - values[lower]);
  return std::clamp(q, 0.5, std::nextafter(1.0, 0.0));
}

RejectionModel calibrate_rejection(FittedNaiveBayes model, const Matrix& rows, double acceptance) {
  std::vector<std::size_t> subset(rows.rows());
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  return calibrate_rejection(std::move(model), rows, subset, acceptance);
}

RejectionModel calibrate_rejection(FittedNaiveBayes model, const Matrix& rows, std::span<const std::size_t> subset,
                                   double acceptance) {
  if (subset.size() < 2) fail(ErrorCode::EmptyInput, "calibration needs at least two rows");
  std::vector<double> winning(subset.size());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const double p = model.posterior(rows.row(subset[k]));
    winning[k] = std::max(p, 1.0 - p);
  }
  const double threshold = rejection_threshold(winning, acceptance);
  const auto accepted = std::count_if(winning.begin(), winning.end(), [&](double w) { return w > threshold; });
  RejectionModel out{std::move(model), threshold, static_cast<double>(accepted) / static_cast<double>(subset.size()),
                     false};
  out.degenerate = std::abs(out.calibration_acceptance - acceptance) > 0.02;
  return out;
}

}  // namespace fxga
