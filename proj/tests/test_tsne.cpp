#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fxga/plot.hpp"
#include "fxga/tsne.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fxga;
using testutil::code_of;

namespace {

Matrix random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, d);
  for (double& v : m.data()) v = g(rng);
  return m;
}

std::vector<Timestamp> hours(std::size_t n) {
  std::vector<Timestamp> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back(parse_timestamp("2016-05-01T00:00:00Z") + std::chrono::hours(i));
  return t;
}

double dist(const Matrix& y, std::size_t a, std::size_t b) {
  return std::hypot(y(a, 0) - y(b, 0), y(a, 1) - y(b, 1));
}

}  // namespace

TEST_CASE("affinities match the dense oracle") {
  const Matrix x = random_rows(50, 5, 1);
  const Affinities a = affinities(x, 10.0);
  const Matrix want = oracle::tsne_p(x, 10.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = 0; j < 50; ++j) worst = std::max(worst, std::abs(a.p(i, j) - want(i, j)));
  CHECK(worst < 1e-8);
}

TEST_CASE("affinity invariants") {
  const Matrix x = random_rows(80, 4, 2);
  const Affinities a = affinities(x, 15.0, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < 80; ++i) {
    CHECK(a.p(i, i) == 0.0);
    CHECK(std::abs(a.entropy_bits[i] - std::log2(15.0)) < 1e-4);
    for (std::size_t j = 0; j < 80; ++j) {
      CHECK(std::abs(a.p(i, j) - a.p(j, i)) <= 1e-12);
      CHECK(a.p(i, j) >= 0.0);
      total += a.p(i, j);
    }
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("square corners share one affinity per distance class") {
  Matrix sq(4, 2);
  const double pts[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) sq(i, j) = pts[i][j];
  const Affinities a = affinities(sq, 1.5);
  const double side = a.p(0, 1);
  const double diagonal = a.p(0, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.p(i, (i + 1) % 4) == doctest::Approx(side).epsilon(1e-12));
    CHECK(a.p(i, (i + 2) % 4) == doctest::Approx(diagonal).epsilon(1e-12));
  }
  CHECK(side > diagonal);
  CHECK(code_of([] { affinities(Matrix(3, 2), 1.5); }) == ErrorCode::TooFewPoints);
  CHECK(code_of([&] { affinities(sq, 3.0); }) == ErrorCode::PerplexityTooLarge);
}

TEST_CASE("configuration checks") {
  EmbeddingConfig c;
  CHECK_NOTHROW(c.validate(1000));
  CHECK(code_of([&] { c.validate(60); }) == ErrorCode::PerplexityTooLarge);
  CHECK(code_of([&] { c.validate(3); }) == ErrorCode::TooFewPoints);
  c.iterations = 100;
  CHECK(code_of([&] { c.validate(1000); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("standardize") {
  Matrix m(3, 2);
  m(0, 0) = 1;
  m(1, 0) = 2;
  m(2, 0) = 3;
  for (std::size_t i = 0; i < 3; ++i) m(i, 1) = 7.0;
  const Matrix z = standardize(m);
  CHECK(z(0, 0) == doctest::Approx(-std::sqrt(1.5)));
  CHECK(z(1, 0) == doctest::Approx(0.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(z(i, 1) == 0.0);
}

TEST_CASE("duplicated inputs embed close together") {
  Matrix x = random_rows(60, 5, 3);
  for (std::size_t j = 0; j < 5; ++j) x(59, j) = x(0, j);
  EmbeddingConfig cfg;
  cfg.perplexity = 10.0;
  cfg.iterations = 400;
  cfg.exaggeration_iterations = 100;
  cfg.momentum_switch = 100;
  cfg.rng_seed = 4;
  cfg.learning_rate = 10.0;
  const Embedding e = optimize(affinities(x, cfg.perplexity).p, cfg);
  std::vector<double> pairs;
  for (std::size_t a = 0; a < 60; ++a)
    for (std::size_t b = a + 1; b < 60; ++b) pairs.push_back(dist(e.y, a, b));
  std::nth_element(pairs.begin(), pairs.begin() + pairs.size() / 2, pairs.end());
  CHECK(dist(e.y, 0, 59) < pairs[pairs.size() / 2]);
  CHECK(e.kl.size() == cfg.iterations + 1);
}

TEST_CASE("rotating the start rotates the embedding") {
  const Matrix x = random_rows(40, 4, 5);
  EmbeddingConfig cfg;
  cfg.perplexity = 8.0;
  cfg.iterations = 300;
  cfg.exaggeration_iterations = 100;
  cfg.momentum_switch = 100;
  cfg.learning_rate = 10.0;
  const Matrix p = affinities(x, cfg.perplexity).p;
  const Matrix y0 = initial_embedding(40, 6);
  const Embedding a = optimize(p, cfg, y0);

  // A quarter turn is exact in floating point, so the whole run must agree.
  Matrix quarter(40, 2);
  for (std::size_t i = 0; i < 40; ++i) {
    quarter(i, 0) = -y0(i, 1);
    quarter(i, 1) = y0(i, 0);
  }
  const Embedding q = optimize(p, cfg, quarter);
  REQUIRE(q.kl.size() == a.kl.size());
  for (std::size_t t = 0; t < a.kl.size(); ++t) CHECK(std::abs(a.kl[t] - q.kl[t]) < 1e-9);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(std::abs(q.y(i, 0) + a.y(i, 1)) < 1e-9);
    CHECK(std::abs(q.y(i, 1) - a.y(i, 0)) < 1e-9);
  }

  // Other angles perturb rounding; the tiny start amplifies that once the
  // points break symmetry, so only the early trace is comparable.
  Matrix r0(40, 2);
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (std::size_t i = 0; i < 40; ++i) {
    r0(i, 0) = c * y0(i, 0) - s * y0(i, 1);
    r0(i, 1) = s * y0(i, 0) + c * y0(i, 1);
  }
  const Embedding b = optimize(p, cfg, r0);
  for (std::size_t t = 0; t <= 20; ++t) CHECK(std::abs(a.kl[t] - b.kl[t]) < 1e-9);
}

TEST_CASE("seeded embeddings repeat exactly") {
  const Matrix x = random_rows(30, 3, 7);
  EmbeddingConfig cfg;
  cfg.perplexity = 5.0;
  cfg.iterations = 260;
  cfg.rng_seed = 8;
  const Matrix p = affinities(x, cfg.perplexity).p;
  const Embedding a = optimize(p, cfg);
  cfg.threads = 3;
  const Embedding b = optimize(p, cfg);
  CHECK(a.y == b.y);
  CHECK(a.kl == b.kl);
  CHECK(initial_embedding(30, 8) == initial_embedding(30, 8));
}

TEST_CASE("embedding export") {
  Matrix y(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    y(i, 0) = 0.1 * static_cast<double>(i) - 1.0 / 3.0;
    y(i, 1) = std::sqrt(2.0) * static_cast<double>(i);
  }
  const std::vector<double> post{0.0, 0.5, 1.0};
  const auto ts = hours(3);
  const auto dir = std::filesystem::temp_directory_path() / "fxga_unit_embed";
  std::filesystem::remove_all(dir);
  export_embedding(dir / "embedding", y, post, ts, {"seed=1"});

  std::ifstream csv(dir / "embedding.csv");
  std::stringstream text;
  text << csv.rdbuf();
  std::size_t data_rows = 0, header_rows = 0;
  std::string line;
  std::istringstream lines(text.str());
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("timestamp", 0) == 0) {
      ++header_rows;
    } else {
      ++data_rows;
    }
  }
  CHECK(header_rows == 1);
  CHECK(data_rows == 3);

  std::istringstream again(text.str());
  const auto back = read_embedding_csv(again);
  CHECK(back == make_points(y, post, ts));

  std::ifstream svg(dir / "embedding.svg");
  std::stringstream s;
  s << svg.rdbuf();
  CHECK(s.str().find("#800080") != std::string::npos);
  CHECK(s.str().find("#0000ff") != std::string::npos);
  CHECK(s.str().find("#ff0000") != std::string::npos);
  std::filesystem::remove_all(dir);

  CHECK(posterior_color(0.5) == "#800080");
  const std::vector<double> two{0.1, 0.2};
  CHECK(code_of([&] { make_points(y, two, ts); }) == ErrorCode::LengthMismatch);
}
