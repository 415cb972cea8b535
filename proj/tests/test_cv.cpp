#include <doctest.h>

#include <algorithm>
#include <random>

#include "fxga/cv.hpp"
#include "test_util.hpp"

using namespace fxga;
using testutil::code_of;

namespace {

Dataset make_rows(std::size_t n, std::size_t d, std::mt19937_64& rng, double separation) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const auto t0 = parse_timestamp("2015-01-01T00:00:00Z");
  Dataset ds;
  ds.x = Matrix(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    const int y = coin(rng) ? 1 : 0;
    ds.y.push_back(y);
    ds.timestamps.push_back(t0 + std::chrono::hours(static_cast<long>(r)));
    ds.candles.push_back(r + 40);
    for (std::size_t i = 0; i < d; ++i) ds.x(r, i) = noise(rng) + separation * y;
  }
  return ds;
}

}  // namespace

TEST_CASE("fold plan is contiguous and balanced") {
  const FoldPlan p = make_fold_plan(14, 7);
  REQUIRE(p.folds.size() == 7);
  for (std::size_t f = 0; f < 7; ++f) {
    CHECK(p.folds[f].first == 2 * f);
    CHECK(p.folds[f].second == 2 * f + 2);
  }
  CHECK(p.fold_of(5) == 2);
  const FoldPlan q = make_fold_plan(100, 7);
  std::size_t covered = 0;
  for (const auto& [lo, hi] : q.folds) {
    CHECK(lo == covered);
    CHECK((hi - lo == 14 || hi - lo == 15));
    covered = hi;
  }
  CHECK(covered == 100);
  CHECK(code_of([] { make_fold_plan(5, 7); }) == ErrorCode::FoldTooSmall);
  CHECK(code_of([] { make_fold_plan(50, 1); }) == ErrorCode::FoldTooSmall);
}

TEST_CASE("separable data scores perfectly") {
  std::mt19937_64 rng(1);
  const Dataset ds = make_rows(280, 2, rng, 40.0);
  const CvReport with = run_cv(ds, CvOptions{7, true});
  CHECK(with.mean_accuracy == 1.0);
  CHECK(with.accuracy_dispersion == 0.0);
  const CvReport without = run_cv(ds, CvOptions{7, false});
  CHECK(without.mean_accuracy == 1.0);
  CHECK(without.acceptance_rate == 1.0);
}

TEST_CASE("coin-flip labels stay near chance") {
  std::size_t inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const Dataset ds = make_rows(350, 3, rng, 0.0);
    const CvReport r = run_cv(ds, CvOptions{7, true});
    if (std::abs(r.mean_accuracy - 0.5) <= 3.0 * r.accuracy_dispersion) ++inside;
  }
  CHECK(inside >= 95);
}

TEST_CASE("out-of-fold bookkeeping") {
  std::mt19937_64 rng(3);
  const Dataset ds = make_rows(203, 4, rng, 0.3);
  const CvReport r = run_cv(ds, CvOptions{7, true});
  CHECK(leakage_free(r));
  CHECK(r.out_of_fold.size() == 203);
  for (std::size_t row = 0; row < 203; ++row) CHECK(r.predicted_by[row] == r.plan.fold_of(row));
  CHECK(std::abs(r.acceptance_rate - 0.5) < 0.1);

  CvReport tampered = r;
  tampered.predicted_by[10] = (tampered.predicted_by[10] + 1) % 7;
  CHECK(!leakage_free(tampered));

  const CvReport again = run_cv(ds, CvOptions{7, true, 0.5, 3});
  CHECK(again.fold_accuracy.size() == r.fold_accuracy.size());
  CHECK(again.mean_accuracy == r.mean_accuracy);
  CHECK(again.out_of_fold == r.out_of_fold);

  const auto signal = out_of_fold_signal(r);
  REQUIRE(signal.size() == ds.size());
  for (std::size_t row = 0; row < ds.size(); ++row) {
    CHECK(signal[row].timestamp == ds.timestamps[row]);
    CHECK(signal[row].candle == ds.candles[row]);
    CHECK(signal[row].decision == r.out_of_fold[row].decision);
  }
}

TEST_CASE("signal stream from hand-built predictions") {
  CvReport r;
  const auto t0 = parse_timestamp("2015-01-01T00:00:00Z");
  for (std::size_t i = 0; i < 4; ++i) {
    r.out_of_fold.push_back(Prediction{Decision::Rejected, 0.5});
    r.timestamps.push_back(t0 + std::chrono::hours(static_cast<long>(i)));
    r.candles.push_back(i);
  }
  auto s = out_of_fold_signal(r);
  CHECK(std::none_of(s.begin(), s.end(), [](const Signal& x) { return x.decision != Decision::Rejected; }));
  r.out_of_fold[2] = Prediction{Decision::Class1, 0.8};
  s = out_of_fold_signal(r);
  CHECK(std::count_if(s.begin(), s.end(), [](const Signal& x) { return x.decision == Decision::Class1; }) == 1);
  CHECK(s[2].timestamp == r.timestamps[2]);
}

TEST_CASE("fold without both classes in its complement") {
  Dataset ds;
  const auto t0 = parse_timestamp("2015-01-01T00:00:00Z");
  ds.x = Matrix(14, 1);
  for (std::size_t r = 0; r < 14; ++r) {
    ds.x(r, 0) = static_cast<double>(r);
    ds.y.push_back(r < 2 ? 1 : 0);
    ds.timestamps.push_back(t0 + std::chrono::hours(static_cast<long>(r)));
    ds.candles.push_back(r);
  }
  CHECK(code_of([&] { run_cv(ds, CvOptions{7, true}); }) == ErrorCode::SingleClassFold);
}
