#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fxga/matrix.hpp"
#include "fxga/timeseries.hpp"

namespace fxga {

struct EmbeddingConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  std::size_t max_points = 5000;
  std::uint64_t rng_seed = 0;
  unsigned threads = 1;

  /// perplexity < (n_points - 1) / 3 and iterations >= 250.
  void validate(std::size_t n_points) const;
  std::string describe() const;
};

/// Columns shifted to zero mean and scaled to unit variance; constant columns become 0.
Matrix standardize(const Matrix& rows);

/// Conditional distribution P(.|i) for one row of squared distances at
/// precision `beta`; entry `self` is 0. Returns the entropy in nats.
double conditional_distribution(std::span<const double> sq_distances, std::size_t self, double beta,
                                std::span<double> out);

struct Affinities {
  Matrix p;                        // symmetric joint affinities, sums to 1
  std::vector<double> beta;        // per-point precision 1 / (2 sigma^2)
  std::vector<double> entropy_bits;
};

/// Standardizes `rows`, calibrates each point's bandwidth by bisection to the
/// target perplexity and symmetrizes.
Affinities affinities(const Matrix& rows, double perplexity, unsigned threads = 1);

/// KL(P || Q) with Student-t (one degree of freedom) similarities Q.
double kl_divergence(const Matrix& p, const Matrix& y);
/// Gradient of kl_divergence with respect to y.
Matrix kl_gradient(const Matrix& p, const Matrix& y, unsigned threads = 1);

/// Gaussian start with standard deviation 1e-4.
Matrix initial_embedding(std::size_t n_points, std::uint64_t seed);

struct Embedding {
  Matrix y;
  std::vector<double> kl;  // kl[t] after t updates, against the unexaggerated P
};

Embedding optimize(const Matrix& p, const EmbeddingConfig& config);
Embedding optimize(const Matrix& p, const EmbeddingConfig& config, Matrix y0);

struct EmbeddingPoint {
  Timestamp timestamp{};
  double y1 = 0.0;
  double y2 = 0.0;
  double posterior = 0.5;

  friend bool operator==(const EmbeddingPoint&, const EmbeddingPoint&) = default;
};

std::vector<EmbeddingPoint> make_points(const Matrix& y, std::span<const double> posteriors,
                                        std::span<const Timestamp> timestamps);

/// Writes `<stem>.csv` and `<stem>.svg`. `header` lines are emitted as `#` comments.
void export_embedding(const std::filesystem::path& stem, const Matrix& y, std::span<const double> posteriors,
                      std::span<const Timestamp> timestamps, const std::vector<std::string>& header);

void write_embedding_csv(std::ostream& out, std::span<const EmbeddingPoint> points,
                         const std::vector<std::string>& header);
std::vector<EmbeddingPoint> read_embedding_csv(std::istream& in);

}  // namespace fxga
