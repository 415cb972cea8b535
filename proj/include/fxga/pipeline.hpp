#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fxga/backtest.hpp"
#include "fxga/bayes.hpp"
#include "fxga/config.hpp"
#include "fxga/cv.hpp"
#include "fxga/ga.hpp"
#include "fxga/io.hpp"
#include "fxga/metrics.hpp"
#include "fxga/timeseries.hpp"

namespace fxga {

/// Chronological train/validation split that hands out the validation side
/// at most once and counts every request.
class StagedData {
 public:
  StagedData(Series full, const SplitSpec& split);

  /// Candles [0, split).
  const Series& training() const noexcept { return training_; }
  std::size_t split_index() const noexcept { return split_; }
  std::size_t size() const noexcept { return full_.size(); }

  /// The whole series; validation rows are the candles from split_index() on.
  /// A second call throws InvalidConfig.
  const Series& open_validation();
  std::size_t validation_accesses() const noexcept { return accesses_; }

 private:
  Series full_;
  Series training_;
  std::size_t split_;
  std::size_t accesses_ = 0;
};

struct ValidationResult {
  std::size_t rows = 0;
  std::vector<Signal> signals;
  ConfusionSummary summary;
  BacktestReport backtest;
};

/// One feature set judged the way the baseline and the optimized stage are.
struct StageResult {
  std::vector<IndicatorSpec> features;
  CvReport cv;
  std::vector<Signal> train_signals;  // out-of-fold
  BacktestReport train_backtest;
  RejectionModel model;               // refit and calibrated on the whole training side
  ValidationResult validation;
  std::size_t validation_accesses = 0;
};

/// CV on the training side, out-of-fold training backtest, refit, then the
/// single validation pass.
StageResult evaluate_features(StagedData& data, const std::vector<IndicatorSpec>& features, const RunConfig& config);

struct OptimizeResult {
  StageResult stage;
  EvolveResult evolution;
  double baseline_fitness = 0.0;
};

ArtifactMeta artifact_meta(const RunConfig& config);

/// `<out>/baseline/`: report, CV and backtest JSON, signal and equity CSVs, SVGs.
StageResult run_baseline(const RunConfig& config);
/// `<out>/optimize/`: the same plus ga_trace.csv and chromosome.json.
OptimizeResult run_optimize(const RunConfig& config);

struct EmbedResult {
  std::size_t rows = 0;    // out-of-fold rows available
  std::size_t points = 0;  // rows embedded
  double kl_after_exaggeration = 0.0;
  double kl_final = 0.0;
  std::filesystem::path csv;
};

/// `<out>/embed/`: embedding.csv, embedding.svg and report.json.
EmbedResult run_embed(const RunConfig& config);

/// Seeded sample of `count` distinct indices out of `n`, in increasing order.
std::vector<std::size_t> subsample(std::size_t n, std::size_t count, std::uint64_t seed);

/// Plain-text metrics tables of the stage reports found under `out`.
std::string format_report(const std::filesystem::path& out);

}  // namespace fxga
