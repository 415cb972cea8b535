#include "fxga/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fxga/error.hpp"
#include "fxga/parallel.hpp"
#include "fxga/plot.hpp"
#include "fxga/random.hpp"

namespace fxga {

void EmbeddingConfig::validate(std::size_t n_points) const {
  if (n_points < 4) fail(ErrorCode::TooFewPoints, "t-SNE needs at least 4 points");
  if (!(perplexity > 1.0)) fail(ErrorCode::InvalidConfig, "perplexity must exceed 1");
  if (!(perplexity < (static_cast<double>(n_points) - 1.0) / 3.0))
    fail(ErrorCode::PerplexityTooLarge, "perplexity must be < (n - 1) / 3 = " +
                                            std::to_string((static_cast<double>(n_points) - 1.0) / 3.0));
  if (iterations < 250) fail(ErrorCode::InvalidConfig, "iterations must be >= 250");
  if (!(learning_rate > 0.0)) fail(ErrorCode::InvalidConfig, "learning_rate must be positive");
}

std::string EmbeddingConfig::describe() const {
  std::ostringstream os;
  os << "perplexity=" << perplexity << " iterations=" << iterations << " learning_rate=" << learning_rate
     << " early_exaggeration=" << early_exaggeration << " exaggeration_iterations=" << exaggeration_iterations
     << " momentum=" << initial_momentum << "/" << final_momentum << " momentum_switch=" << momentum_switch
     << " max_points=" << max_points << " seed=" << rng_seed;
  return os.str();
}

Matrix standardize(const Matrix& rows) {
  Matrix out = rows;
  const std::size_t n = rows.rows();
  for (std::size_t c = 0; c < rows.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += rows(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (rows(r, c) - mean) * (rows(r, c) - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (std::size_t r = 0; r < n; ++r) out(r, c) = sd > 0.0 ? (rows(r, c) - mean) / sd : 0.0;
  }
  return out;
}

double conditional_distribution(std::span<const double> d, std::size_t self, double beta, std::span<double> out) {
  // Shift by the nearest neighbour distance so exp() cannot underflow to all zeros.
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.size(); ++j)
    if (j != self) nearest = std::min(nearest, d[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double gap = d[j] - nearest;
    out[j] = j == self ? 0.0 : gap == 0.0 ? 1.0 : std::exp(-beta * gap);
    sum += out[j];
  }
  double entropy = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    out[j] /= sum;
    if (out[j] > 0.0) entropy -= out[j] * std::log(out[j]);
  }
  return entropy;
}

Affinities affinities(const Matrix& rows, double perplexity, unsigned threads) {
  const std::size_t n = rows.rows();
  if (n < 4) fail(ErrorCode::TooFewPoints, "t-SNE needs at least 4 points");
  if (!(perplexity > 1.0)) fail(ErrorCode::InvalidConfig, "perplexity must exceed 1");
  if (perplexity >= static_cast<double>(n) - 1.0)
    fail(ErrorCode::PerplexityTooLarge, "perplexity must be below n - 1");

  const Matrix x = standardize(rows);
  const double target = std::log(perplexity);
  Matrix cond(n, n);
  Affinities out;
  out.beta.assign(n, 1.0);
  out.entropy_bits.assign(n, 0.0);

  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double diff = x(i, c) - x(j, c);
        s += diff * diff;
      }
      d[j] = s;
    }
    // Entropy decreases monotonically in beta: bracket, then bisect.
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double h = conditional_distribution(d, i, beta, cond.row(i));
    for (int it = 0; it < 2000 && std::abs(h - target) > 1e-12; ++it) {
      if (h > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (lo + hi);
      } else {
        hi = beta;
        beta = 0.5 * (lo + hi);
      }
      if (!std::isinf(hi) && hi - lo <= 1e-15 * hi) break;
      if (std::isinf(beta)) break;
      h = conditional_distribution(d, i, beta, cond.row(i));
    }
    out.beta[i] = beta;
    out.entropy_bits[i] = h / std::log(2.0);
  });

  out.p = Matrix(n, n);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (cond(i, j) + cond(j, i)) / denom;
      out.p(i, j) = v;
      out.p(j, i) = v;
    }
  }
  return out;
}

namespace {

double student_weight(const Matrix& y, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < y.cols(); ++c) {
    const double d = y(i, c) - y(j, c);
    s += d * d;
  }
  return 1.0 / (1.0 + s);
}

// Sum of Student-t weights over ordered pairs i != j, accumulated per row so
// the total is independent of the thread count.
double normalizer(const Matrix& y, unsigned threads) {
  const std::size_t n = y.rows();
  std::vector<double> partial(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += student_weight(y, i, j);
    partial[i] = s;
  });
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

// Gradient of KL(scale * P || Q); also returns KL(P || Q) for the unscaled P.
double gradient_and_kl(const Matrix& p, const Matrix& y, double scale, Matrix& grad, unsigned threads) {
  const std::size_t n = y.rows();
  const std::size_t dims = y.cols();
  const double z = normalizer(y, threads);
  const double log_z = std::log(z);
  std::vector<double> partial_kl(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> g(dims, 0.0);
    double kl = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = student_weight(y, i, j);
      const double pij = p(i, j);
      const double coeff = 4.0 * (scale * pij - w / z) * w;
      for (std::size_t c = 0; c < dims; ++c) g[c] += coeff * (y(i, c) - y(j, c));
      if (pij > 0.0) kl += pij * (std::log(pij) - std::log(w) + log_z);
    }
    for (std::size_t c = 0; c < dims; ++c) grad(i, c) = g[c];
    partial_kl[i] = kl;
  });
  return std::accumulate(partial_kl.begin(), partial_kl.end(), 0.0);
}

}  // namespace

double kl_divergence(const Matrix& p, const Matrix& y) {
  const std::size_t n = y.rows();
  const double log_z = std::log(normalizer(y, 1));
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && p(i, j) > 0.0) kl += p(i, j) * (std::log(p(i, j)) - std::log(student_weight(y, i, j)) + log_z);
  return kl;
}

Matrix kl_gradient(const Matrix& p, const Matrix& y, unsigned threads) {
  Matrix grad(y.rows(), y.cols());
  gradient_and_kl(p, y, 1.0, grad, threads);
  return grad;
}

Matrix initial_embedding(std::size_t n_points, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x75E1);
  Matrix y(n_points, 2);
  for (double& v : y.data()) v = 1e-4 * normal(rng);
  return y;
}

Embedding optimize(const Matrix& p, const EmbeddingConfig& config) {
  return optimize(p, config, initial_embedding(p.rows(), config.rng_seed));
}

Embedding optimize(const Matrix& p, const EmbeddingConfig& config, Matrix y0) {
  const std::size_t n = p.rows();
  config.validate(n);
  if (p.cols() != n || y0.rows() != n) fail(ErrorCode::DimensionMismatch, "P must be n x n and match the start");

  Embedding out;
  out.y = std::move(y0);
  out.kl.reserve(config.iterations + 1);
  Matrix grad(n, out.y.cols());
  Matrix velocity(n, out.y.cols());
  for (std::size_t t = 0; t < config.iterations; ++t) {
    const double scale = t < config.exaggeration_iterations ? config.early_exaggeration : 1.0;
    const double momentum = t < config.momentum_switch ? config.initial_momentum : config.final_momentum;
    out.kl.push_back(gradient_and_kl(p, out.y, scale, grad, config.threads));
    auto v = velocity.data();
    auto g = grad.data();
    auto y = out.y.data();
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = momentum * v[k] - config.learning_rate * g[k];
      y[k] += v[k];
    }
    for (std::size_t c = 0; c < out.y.cols(); ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += out.y(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) out.y(i, c) -= mean;
    }
  }
  out.kl.push_back(gradient_and_kl(p, out.y, 1.0, grad, config.threads));
  return out;
}

std::vector<EmbeddingPoint> make_points(const Matrix& y, std::span<const double> posteriors,
                                        std::span<const Timestamp> timestamps) {
  if (y.rows() != posteriors.size() || y.rows() != timestamps.size())
    fail(ErrorCode::LengthMismatch, "embedding, posteriors and timestamps differ in length");
  if (y.cols() != 2) fail(ErrorCode::DimensionMismatch, "embedding must be 2-d");
  std::vector<EmbeddingPoint> pts(y.rows());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {timestamps[i], y(i, 0), y(i, 1), posteriors[i]};
  return pts;
}

void write_embedding_csv(std::ostream& out, std::span<const EmbeddingPoint> points,
                         const std::vector<std::string>& header) {
  for (const std::string& h : header) out << "# " << h << '\n';
  out << "timestamp,y1,y2,posterior\n";
  for (const EmbeddingPoint& p : points)
    out << format_timestamp(p.timestamp) << ',' << format_double(p.y1) << ',' << format_double(p.y2) << ','
        << format_double(p.posterior) << '\n';
}

std::vector<EmbeddingPoint> read_embedding_csv(std::istream& in) {
  std::vector<EmbeddingPoint> pts;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "timestamp,y1,y2,posterior") throw Error(ErrorCode::MalformedRow, "bad embedding header", line_no);
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string ts, a, b, c;
    if (!std::getline(ss, ts, ',') || !std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw Error(ErrorCode::MalformedRow, "expected 4 fields", line_no);
    try {
      EmbeddingPoint p{parse_timestamp(ts), 0.0, 0.0, 0.0};
      if (!parse_double(a, p.y1) || !parse_double(b, p.y2) || !parse_double(c, p.posterior))
        throw Error(ErrorCode::MalformedRow, "bad number", line_no);
      pts.push_back(p);
    } catch (const Error&) {
      throw Error(ErrorCode::MalformedRow, "bad embedding row", line_no);
    }
  }
  return pts;
}

void export_embedding(const std::filesystem::path& stem, const Matrix& y, std::span<const double> posteriors,
                      std::span<const Timestamp> timestamps, const std::vector<std::string>& header) {
  const auto points = make_points(y, posteriors, timestamps);
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path svg = stem;
  svg += ".svg";
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::ofstream out(csv, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + csv.string());
  write_embedding_csv(out, points, header);
  std::ofstream out_svg(svg, std::ios::binary);
  if (!out_svg) fail(ErrorCode::IoError, "cannot write " + svg.string());
  write_scatter_svg(out_svg, points, "t-SNE embedding coloured by P(up)");
}

}  // namespace fxga
