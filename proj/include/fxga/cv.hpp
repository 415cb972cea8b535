#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fxga/bayes.hpp"
#include "fxga/dataset.hpp"
#include "fxga/metrics.hpp"

namespace fxga {

/// k contiguous, unshuffled folds whose sizes differ by at most one.
struct FoldPlan {
  std::size_t k = 7;
  std::vector<std::pair<std::size_t, std::size_t>> folds;  // [begin, end) row ranges

  std::size_t fold_of(std::size_t row) const;
};

FoldPlan make_fold_plan(std::size_t n_rows, std::size_t k);

struct CvOptions {
  std::size_t k = 7;
  bool rejection = true;
  double acceptance = 0.5;  // target acceptance of the rejection calibration
  unsigned threads = 1;
};

struct CvReport {
  std::size_t k = 0;
  bool rejection = false;
  FoldPlan plan;
  std::vector<double> fold_accuracy;        // NaN for folds with no accepted rows
  std::vector<std::size_t> fold_accepted;
  std::vector<double> fold_threshold;       // p_rejection used by each fold model
  double mean_accuracy = 0.0;               // mean over folds with accepted rows
  double accuracy_dispersion = 0.0;         // sample standard deviation of the same
  ConfusionSummary summary;
  double acceptance_rate = 0.0;

  // One entry per dataset row, in chronological order.
  std::vector<Prediction> out_of_fold;
  std::vector<int> labels;
  std::vector<Timestamp> timestamps;
  std::vector<std::size_t> candles;
  /// Fold model that produced each out-of-fold prediction.
  std::vector<std::size_t> predicted_by;
  /// Training row ranges of each fold model.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> training_ranges;
};

CvReport run_cv(const Dataset& data, const CvOptions& options);

/// True when no prediction came from a model trained on its own row.
bool leakage_free(const CvReport& report);

/// Trading decision aligned to a candle: Class1 = buy, Class0 = sell, Rejected = none.
struct Signal {
  Timestamp timestamp{};
  std::size_t candle = 0;
  Decision decision = Decision::Rejected;
  double posterior = 0.5;

  friend bool operator==(const Signal&, const Signal&) = default;
};

std::vector<Signal> out_of_fold_signal(const CvReport& report);

}  // namespace fxga
