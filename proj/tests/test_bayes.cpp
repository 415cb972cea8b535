#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fxga/bayes.hpp"
#include "fxga/io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fxga;
using testutil::code_of;

namespace {

Matrix column(const std::vector<double>& v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

Matrix gaussian_rows(std::size_t n, std::size_t d, std::vector<int>& y, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix x(n, d);
  y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    y[r] = static_cast<int>(r % 2);
    for (std::size_t i = 0; i < d; ++i) x(r, i) = noise(rng) + (y[r] ? 0.4 * static_cast<double>(i + 1) : 0.0);
  }
  return x;
}

}  // namespace

TEST_CASE("fit estimates priors and population moments") {
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = fit(column({-1.0, 1.0, 4.0, 6.0}), y);
  CHECK(m.stats().prior[0] == 0.5);
  CHECK(m.stats().prior[1] == 0.5);
  CHECK(m.stats().mean[0][0] == 0.0);
  CHECK(m.stats().variance[0][0] == 1.0);
  CHECK(m.stats().mean[1][0] == 5.0);
  CHECK(m.stats().variance[1][0] == 1.0);

  const std::vector<int> skew{0, 0, 0, 1, 1, 0};
  CHECK(fit(column({1, 2, 3, 4, 5, 6}), skew).stats().prior[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("fit errors") {
  CHECK(code_of([] { fit(Matrix(0, 1), std::vector<int>{}); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { fit(column({1, 2, 3}), std::vector<int>{1, 1, 1}); }) == ErrorCode::SingleClassData);
  CHECK(code_of([] { fit(column({1, 2, 3}), std::vector<int>{1, 0}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("posterior symmetry and tails") {
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = fit(column({-3.0, -1.0, 1.0, 3.0}), y);
  const double mid[] = {0.0};
  CHECK(std::abs(m.posterior(mid) - 0.5) < 1e-12);
  const double far[] = {2.0 + 7.0};
  CHECK(m.posterior(far) > 0.999);
  const double other[] = {-9.0};
  CHECK(m.posterior(other) < 0.001);
}

TEST_CASE("posterior matches the density-product oracle") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> y;
    const Matrix x = gaussian_rows(40, 5, y, rng);
    const auto m = fit(x, y);
    const auto o = oracle::fit_nb(x, y);
    std::normal_distribution<double> pick(0.5, 1.0);
    std::vector<double> q(5);
    for (double& v : q) v = pick(rng);
    CHECK(std::abs(m.posterior(q) - oracle::nb_posterior(o, q)) < 1e-9);
  }
}

TEST_CASE("many features do not underflow") {
  std::mt19937_64 rng(4);
  std::vector<int> y;
  const Matrix x = gaussian_rows(200, 60, y, rng);
  const auto m = fit(x, y);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double p = m.posterior(x.row(r));
    CHECK(std::isfinite(p));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("swapping labels mirrors the posterior") {
  std::mt19937_64 rng(23);
  std::vector<int> y;
  const Matrix x = gaussian_rows(60, 4, y, rng);
  std::vector<int> swapped(y.size());
  std::transform(y.begin(), y.end(), swapped.begin(), [](int v) { return 1 - v; });
  const auto a = fit(x, y);
  const auto b = fit(x, swapped);
  for (std::size_t r = 0; r < x.rows(); ++r) CHECK(std::abs(a.posterior(x.row(r)) - (1.0 - b.posterior(x.row(r)))) < 1e-12);
}

TEST_CASE("fitting ignores row order") {
  std::mt19937_64 rng(29);
  std::vector<int> y;
  const Matrix x = gaussian_rows(50, 3, y, rng);
  std::vector<std::size_t> order(50);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  Matrix xp(50, 3);
  std::vector<int> yp(50);
  for (std::size_t r = 0; r < 50; ++r) {
    for (std::size_t i = 0; i < 3; ++i) xp(r, i) = x(order[r], i);
    yp[r] = y[order[r]];
  }
  const auto a = fit(x, y);
  const auto b = fit(xp, yp);
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.stats().mean[c][i] == doctest::Approx(b.stats().mean[c][i]).epsilon(1e-12));
      CHECK(a.stats().variance[c][i] == doctest::Approx(b.stats().variance[c][i]).epsilon(1e-12));
    }
}

TEST_CASE("constant feature gets a variance floor") {
  Matrix x(6, 2);
  for (std::size_t r = 0; r < 6; ++r) {
    x(r, 0) = 1.0;
    x(r, 1) = static_cast<double>(r);
  }
  const auto m = fit(x, std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(m.stats().variance[0][0] > 0.0);
  CHECK(std::isfinite(m.posterior(x.row(2))));
}

TEST_CASE("rejection rule is strict") {
  CHECK(decide(0.5, 0.5).decision == Decision::Rejected);
  CHECK(decide(0.9, 0.7).decision == Decision::Class1);
  CHECK(decide(0.2, 0.7).decision == Decision::Class0);
  CHECK(decide(0.7, 0.7).decision == Decision::Rejected);
  CHECK(decide(0.3, 0.7).decision == Decision::Rejected);
  CHECK(decide(0.51, 0.5).decision == Decision::Class1);
}

TEST_CASE("threshold is the median of the winning posteriors") {
  CHECK(rejection_threshold({0.6, 0.7, 0.8, 0.9}) == doctest::Approx(0.75));
  CHECK(rejection_threshold({0.9, 0.6, 0.8, 0.7}) == doctest::Approx(0.75));
  CHECK(rejection_threshold({0.6, 0.7, 0.8, 0.9}, 0.25) == doctest::Approx(0.825));
  CHECK(rejection_threshold({0.5, 0.5}) == 0.5);
  CHECK(rejection_threshold({1.0, 1.0}) < 1.0);
  CHECK(code_of([] { rejection_threshold({}); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { rejection_threshold({0.6}, 1.0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("calibration") {
  std::mt19937_64 rng(31);
  std::vector<int> y;
  const Matrix x = gaussian_rows(1000, 3, y, rng);
  const auto rm = calibrate_rejection(fit(x, y), x);
  CHECK(std::abs(rm.calibration_acceptance - 0.5) <= 0.02);
  CHECK(!rm.degenerate);
  std::size_t accepted = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) accepted += predict_with_rejection(rm, x.row(r)).decision != Decision::Rejected;
  CHECK(static_cast<double>(accepted) / 1000.0 == rm.calibration_acceptance);

  Matrix same(10, 3);
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t i = 0; i < 3; ++i) same(r, i) = x(0, i);
  const auto degenerate = calibrate_rejection(fit(x, y), same);
  const double p = fit(x, y).posterior(same.row(0));
  CHECK(degenerate.p_rejection == doctest::Approx(std::max(p, 1.0 - p)));
  CHECK(degenerate.calibration_acceptance == 0.0);
  CHECK(degenerate.degenerate);
}

TEST_CASE("make_rejection_model bounds") {
  const auto m = fit(column({-1, 1, 4, 6}), std::vector<int>{0, 0, 1, 1});
  CHECK(make_rejection_model(m, 0.6).p_rejection == 0.6);
  CHECK(code_of([&] { make_rejection_model(m, 1.0); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { make_rejection_model(m, 0.4); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("model JSON round-trip") {
  std::mt19937_64 rng(37);
  std::vector<int> y;
  const Matrix x = gaussian_rows(100, 6, y, rng);
  const auto rm = calibrate_rejection(fit(x, y), x);
  const auto specs = default_specs();
  const Json j = to_json(rm, specs);
  const RejectionModel back = rejection_model_from_json(Json::parse(j.dump()));
  CHECK(back.p_rejection == rm.p_rejection);
  for (std::size_t r = 0; r < x.rows(); ++r) CHECK(back.model.posterior(x.row(r)) == rm.model.posterior(x.row(r)));
}
