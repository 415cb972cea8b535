#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fxga/matrix.hpp"

namespace fxga {

enum class Decision { Class0 = 0, Class1 = 1, Rejected = 2 };

/// Per-class priors and per-(class, feature) Gaussian moments.
struct ClassConditionalStats {
  std::array<double, 2> prior{0.5, 0.5};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;
};

/// Gaussian Naive Bayes for binary labels.
class FittedNaiveBayes {
 public:
  explicit FittedNaiveBayes(ClassConditionalStats stats);

  const ClassConditionalStats& stats() const noexcept { return stats_; }
  std::size_t n_features() const noexcept { return stats_.mean[0].size(); }

  /// log P(y) + sum_i log N(x_i; mu_yi, var_yi).
  double log_joint(std::span<const double> x, int y) const;
  /// P(y = 1 | x), evaluated in log space.
  double posterior(std::span<const double> x) const;

 private:
  ClassConditionalStats stats_;
  std::array<double, 2> log_prior_{};
  std::array<std::vector<double>, 2> log_norm_;
  std::array<std::vector<double>, 2> inv_two_var_;
};

/// Fits on every row of `x`.
FittedNaiveBayes fit(const Matrix& x, std::span<const int> labels);
/// Fits on the listed rows only; `labels` is indexed like the rows of `x`.
FittedNaiveBayes fit(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows);

double posterior(const FittedNaiveBayes& model, std::span<const double> x);

struct Prediction {
  Decision decision = Decision::Rejected;
  double posterior = 0.5;  // P(y = 1 | x)

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Accepts the winning class only when its posterior strictly exceeds the threshold.
Prediction decide(double posterior, double p_rejection);

struct RejectionModel {
  FittedNaiveBayes model;
  double p_rejection = 0.5;
  /// Fraction of the calibration rows the threshold accepts.
  double calibration_acceptance = 0.0;
  /// Set when the calibration rows could not be split near 50/50 (e.g. ties).
  bool degenerate = false;
};

RejectionModel make_rejection_model(FittedNaiveBayes model, double p_rejection);

Prediction predict_with_rejection(const RejectionModel& model, std::span<const double> x);

/// The (1 - acceptance) quantile of the winning-class posteriors (linear
/// interpolation between order statistics), clamped into [0.5, 1). With the
/// default acceptance of 0.5 this is the median.
double rejection_threshold(std::vector<double> max_posteriors, double acceptance = 0.5);

/// Chooses p_rejection so that `acceptance` of `rows` (default: half) are accepted.
RejectionModel calibrate_rejection(FittedNaiveBayes model, const Matrix& rows, double acceptance = 0.5);
RejectionModel calibrate_rejection(FittedNaiveBayes model, const Matrix& rows, std::span<const std::size_t> subset,
                                   double acceptance = 0.5);

}  // namespace fxga
