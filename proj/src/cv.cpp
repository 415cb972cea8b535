#include "fxga/cv.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "fxga/error.hpp"
#include "fxga/parallel.hpp"

namespace fxga {

std::size_t FoldPlan::fold_of(std::size_t row) const {
  for (std::size_t f = 0; f < folds.size(); ++f)
    if (row >= folds[f].first && row < folds[f].second) return f;
  return folds.size();
}

FoldPlan make_fold_plan(std::size_t n_rows, std::size_t k) {
  if (k < 2) fail(ErrorCode::FoldTooSmall, "k must be at least 2");
  if (n_rows < k) fail(ErrorCode::FoldTooSmall, std::to_string(n_rows) + " rows cannot fill " + std::to_string(k) + " folds");
  FoldPlan plan;
  plan.k = k;
  const std::size_t base = n_rows / k;
  const std::size_t extra = n_rows % k;
  std::size_t begin = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    plan.folds.emplace_back(begin, begin + size);
    begin += size;
  }
  return plan;
}

CvReport run_cv(const Dataset& data, const CvOptions& options) {
  const std::size_t n = data.size();
  const FoldPlan plan = make_fold_plan(n, options.k);

  CvReport report;
  report.k = options.k;
  report.rejection = options.rejection;
  report.plan = plan;
  report.fold_accuracy.assign(options.k, std::numeric_limits<double>::quiet_NaN());
  report.fold_accepted.assign(options.k, 0);
  report.fold_threshold.assign(options.k, 0.5);
  report.out_of_fold.assign(n, Prediction{});
  report.predicted_by.assign(n, options.k);
  report.training_ranges.resize(options.k);

  // Each fold writes only its own slots, so folds can run concurrently.
  parallel_for(options.k, options.threads, [&](std::size_t f) {
    const auto [lo, hi] = plan.folds[f];
    std::vector<std::size_t> train;
    train.reserve(n - (hi - lo));
    for (std::size_t r = 0; r < n; ++r)
      if (r < lo || r >= hi) train.push_back(r);

    std::array<std::size_t, 2> counts{0, 0};
    for (std::size_t r : train) ++counts[static_cast<std::size_t>(data.y[r])];
    if (counts[0] < 2 || counts[1] < 2)
      fail(ErrorCode::SingleClassFold, "training complement of fold " + std::to_string(f) + " lacks a class");

    FittedNaiveBayes model = fit(data.x, data.y, train);
    double threshold = 0.5;
    if (options.rejection) threshold = calibrate_rejection(model, data.x, train, options.acceptance).p_rejection;

    std::size_t accepted = 0;
    std::size_t correct = 0;
    for (std::size_t r = lo; r < hi; ++r) {
      const double p = model.posterior(data.x.row(r));
      Prediction pred;
      if (options.rejection) {
        pred = decide(p, threshold);
      } else {
        pred = Prediction{p >= 0.5 ? Decision::Class1 : Decision::Class0, p};
      }
      report.out_of_fold[r] = pred;
      report.predicted_by[r] = f;
      if (pred.decision != Decision::Rejected) {
        ++accepted;
        if (static_cast<int>(pred.decision) == data.y[r]) ++correct;
      }
    }
    report.fold_threshold[f] = threshold;
    report.fold_accepted[f] = accepted;
    if (accepted > 0) report.fold_accuracy[f] = static_cast<double>(correct) / static_cast<double>(accepted);
    if (lo > 0) report.training_ranges[f].emplace_back(0, lo);
    if (hi < n) report.training_ranges[f].emplace_back(hi, n);
  });

  std::vector<double> scored;
  for (double a : report.fold_accuracy)
    if (!std::isnan(a)) scored.push_back(a);
  if (!scored.empty()) {
    report.mean_accuracy = std::accumulate(scored.begin(), scored.end(), 0.0) / static_cast<double>(scored.size());
    if (scored.size() > 1) {
      double ss = 0.0;
      for (double a : scored) ss += (a - report.mean_accuracy) * (a - report.mean_accuracy);
      report.accuracy_dispersion = std::sqrt(ss / static_cast<double>(scored.size() - 1));
    }
  }

  std::vector<Decision> decisions(n);
  for (std::size_t r = 0; r < n; ++r) decisions[r] = report.out_of_fold[r].decision;
  report.summary = summarize(decisions, data.y);
  report.acceptance_rate = report.summary.acceptance_rate;
  report.labels = data.y;
  report.timestamps = data.timestamps;
  report.candles = data.candles;
  return report;
}

bool leakage_free(const CvReport& report) {
  for (std::size_t r = 0; r < report.out_of_fold.size(); ++r) {
    const std::size_t f = report.predicted_by[r];
    if (f >= report.training_ranges.size()) return false;
    for (const auto& [lo, hi] : report.training_ranges[f])
      if (r >= lo && r < hi) return false;
  }
  return true;
}

std::vector<Signal> out_of_fold_signal(const CvReport& report) {
  std::vector<Signal> out(report.out_of_fold.size());
  for (std::size_t r = 0; r < out.size(); ++r)
    out[r] = Signal{report.timestamps[r], report.candles[r], report.out_of_fold[r].decision,
                    report.out_of_fold[r].posterior};
  return out;
}

}  // namespace fxga
