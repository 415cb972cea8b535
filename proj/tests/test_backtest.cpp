#include <doctest.h>

#include <random>

#include "fxga/backtest.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fxga;
using testutil::closes_only;
using testutil::code_of;

namespace {

std::vector<Signal> signals(const Series& s, const std::vector<Decision>& d) {
  std::vector<Signal> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(Signal{s[i].timestamp, i, d[i], 0.5});
  return out;
}

constexpr Decision B = Decision::Class1;
constexpr Decision S = Decision::Class0;
constexpr Decision R = Decision::Rejected;

}  // namespace

TEST_CASE("one-bar trades") {
  const Series s = closes_only({1.1000, 1.1011});
  const auto buy = simulate(s, signals(s, {B}));
  REQUIRE(buy.trades.size() == 1);
  CHECK(buy.trades[0].ret == doctest::Approx(0.001));
  CHECK(buy.roi == doctest::Approx(0.1));
  const auto sell = simulate(s, signals(s, {S}));
  CHECK(sell.trades[0].ret == doctest::Approx(-0.001));
  CHECK(sell.roi_sell == doctest::Approx(-0.1));
  const auto cost = simulate(s, signals(s, {B}), BacktestOptions{0.0002});
  CHECK(cost.trades[0].ret == doctest::Approx(0.0008));
}

TEST_CASE("flipping every decision negates the result") {
  std::mt19937_64 rng(6);
  const Series s = oracle::random_series(200, rng);
  std::uniform_int_distribution<int> pick(0, 2);
  std::vector<Decision> d(199), flipped(199);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = static_cast<Decision>(pick(rng));
    flipped[i] = d[i] == B ? S : d[i] == S ? B : R;
  }
  const auto a = simulate(s, signals(s, d));
  const auto b = simulate(s, signals(s, flipped));
  CHECK(a.roi == doctest::Approx(-b.roi));
  CHECK(a.roi_buy == doctest::Approx(-b.roi_sell));
  CHECK(a.curve.combined.size() == 200);
  CHECK(a.drawdown.value == doctest::Approx(oracle::drawdown(a.curve.combined)));
}

TEST_CASE("no trades") {
  const Series s = closes_only({1.0, 1.1, 1.2, 1.1});
  const auto r = simulate(s, signals(s, {R, R, R}));
  CHECK(r.trades.empty());
  CHECK(r.roi == 0.0);
  CHECK(r.drawdown.value == 0.0);
  CHECK(r.table.acceptance_rate == 0.0);
  CHECK(r.table.total.trades == 0);
  CHECK(r.table.per_class[1].precision == 0.0);
  const auto none = simulate(s, std::vector<Signal>{});
  CHECK(none.roi == 0.0);
  CHECK(none.annualized_roi == 0.0);
}

TEST_CASE("max drawdown") {
  const std::vector<double> up{0, 1, 2, 3};
  CHECK(max_drawdown(up).value == 0.0);
  const std::vector<double> c{0, 10, -5, 2};
  const Drawdown dd = max_drawdown(c);
  CHECK(dd.value == -15.0);
  CHECK(dd.peak == 1);
  CHECK(dd.trough == 2);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> step(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> curve{0.0};
    for (int i = 0; i < 80; ++i) curve.push_back(curve.back() + step(rng));
    const Drawdown got = max_drawdown(curve);
    CHECK(got.value == oracle::drawdown(curve));
    CHECK(curve[got.trough] - curve[got.peak] == got.value);
  }
}

TEST_CASE("annualization prorates linearly") {
  using namespace std::chrono;
  CHECK(annualize(28.53, duration_cast<seconds>(months{36})) == doctest::Approx(9.51).epsilon(1e-3));
  CHECK(annualize(10.0, duration_cast<seconds>(years{2})) == doctest::Approx(5.0));
  CHECK(code_of([] { annualize(1.0, seconds{0}); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("metrics table from a known confusion") {
  // true labels and decisions: 3 buys (2 right), 3 sells (1 right), 2 rejected.
  const std::vector<Decision> d{B, B, B, S, S, S, R, R};
  const std::vector<int> y{1, 1, 0, 0, 1, 1, 1, 0};
  const std::vector<double> ret{0.01, 0.02, -0.01, -0.02, 0.01, 0.03, 0.01, -0.01};
  const MetricsTable t = metrics_table(d, y, ret);
  CHECK(t.per_class[1].precision == doctest::Approx(2.0 / 3.0));
  CHECK(t.per_class[0].precision == doctest::Approx(1.0 / 3.0));
  CHECK(t.per_class[1].recall == doctest::Approx(2.0 / 5.0));
  CHECK(t.per_class[0].recall == doctest::Approx(1.0 / 3.0));
  CHECK(t.per_class[1].roi == doctest::Approx(2.0));
  CHECK(t.per_class[0].roi == doctest::Approx(-2.0));
  CHECK(t.total.roi == doctest::Approx(0.0));
  CHECK(t.accuracy == doctest::Approx(0.5));
  CHECK(t.acceptance_rate == doctest::Approx(0.75));
  CHECK(t.per_class[1].trades == 3);
  CHECK(t.total.precision == doctest::Approx(0.5));

  const std::vector<Decision> right{B, S};
  const MetricsTable p = metrics_table(right, std::vector<int>{1, 0}, std::vector<double>{0.1, -0.1});
  CHECK(p.per_class[1].precision == 1.0);
  CHECK(p.per_class[0].recall == 1.0);
  CHECK(p.accuracy == 1.0);
}

TEST_CASE("misaligned decisions") {
  const Series s = closes_only({1.0, 1.1, 1.2});
  auto sig = signals(s, {B, S});
  std::swap(sig[0], sig[1]);
  CHECK(code_of([&] { simulate(s, sig); }) == ErrorCode::MisalignedDecisions);
  auto off = signals(s, {B});
  off[0].timestamp += std::chrono::minutes(30);
  CHECK(code_of([&] { simulate(s, off); }) == ErrorCode::MisalignedDecisions);
  CHECK(code_of([&] { simulate(s, signals(s, {R, R, B})); }) == ErrorCode::MisalignedDecisions);
  CHECK(simulate(s, signals(s, {R, B, R})).trades.size() == 1);
}
