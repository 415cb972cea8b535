#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fxga/indicators.hpp"
#include "fxga/random.hpp"
#include "fxga/timeseries.hpp"

namespace fxga {

/// One feature slot: an optional indicator with its (latent) window genes.
struct Gene {
  bool enabled = false;
  IndicatorKind kind = IndicatorKind::RSI;
  int p1 = kMinWindow;
  int p2 = kMinWindow + 1;
  int p3 = kMinWindow;

  IndicatorSpec spec() const { return IndicatorSpec{kind, p1, p2, p3}.normalized(); }
  friend bool operator==(const Gene&, const Gene&) = default;
};

inline constexpr std::size_t kDefaultSlots = 12;

struct Chromosome {
  std::vector<Gene> slots;

  /// Specs of the enabled slots in slot order.
  std::vector<IndicatorSpec> specs() const;
  std::size_t enabled_count() const;
  /// True when at least one slot is enabled and every gene is in range.
  bool valid() const;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

struct GaConfig {
  std::size_t population_size = 64;
  std::size_t generations = 60;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;        // per gene
  double hyper_mutation_rate = 0.25;  // per gene, while stagnating
  double replacement_rate = 0.1;
  std::size_t stagnation_window = 3;
  std::size_t slots = kDefaultSlots;
  std::uint64_t rng_seed = 0;
  unsigned threads = 1;

  void validate() const;
  /// ceil(replacement_rate * population_size).
  std::size_t immigrant_count() const;
};

Gene random_gene(Rng& rng);
Chromosome random_chromosome(std::size_t slots, Rng& rng);

/// Clamps windows, orders MACD windows and enables a random slot when none is.
void repair(Chromosome& c, Rng& rng);

/// The six default-parameter indicators followed by disabled slots.
Chromosome baseline_chromosome(std::size_t slots = kDefaultSlots);

/// Fitness-proportional sampling with replacement; uniform when every fitness
/// is zero (or the total is not positive).
std::vector<std::size_t> select(std::span<const double> fitness, std::size_t count, Rng& rng);

/// With probability `rate`, swaps each slot with probability 0.5; otherwise copies.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, double rate, Rng& rng);

/// Each gene is redrawn uniformly (enabled bit, kind and windows) with probability `rate`.
Chromosome mutate(const Chromosome& c, double rate, Rng& rng);

using FitnessFn = std::function<double(const Chromosome&)>;

struct GenerationRecord {
  std::size_t generation = 0;
  double max_fitness = 0.0;
  double mean_fitness = 0.0;
  double min_fitness = 0.0;
  Chromosome best;
  bool hyper_mutation = false;
  double mutation_rate = 0.0;
  /// Fitness of the pool (elite + offspring) before immigrants arrived.
  std::vector<double> pool_fitness;
  /// Pool positions replaced by immigrants.
  std::vector<std::size_t> replaced;
  std::vector<double> population_fitness;
};

struct GaTrace {
  std::vector<GenerationRecord> generations;
  std::size_t evaluations = 0;
};

struct EvolveResult {
  Chromosome best;
  double best_fitness = 0.0;
  GaTrace trace;
};

/// Genetic search with random immigrants and hyper-mutation. `seeds` are
/// injected into the initial population ahead of the random individuals.
EvolveResult evolve(const GaConfig& config, const FitnessFn& fitness, std::span<const Chromosome> seeds = {});

/// Cross-validated accuracy of a chromosome's features on one training series.
/// Thread-safe; results and indicator columns are memoized.
class CvFitness {
 public:
  CvFitness(Series training, std::size_t k, double acceptance = 0.5, unsigned cv_threads = 1);

  double operator()(const Chromosome& c);
  std::size_t cache_size() const;

 private:
  Series training_;
  std::size_t k_;
  double acceptance_;
  unsigned cv_threads_;
  ColumnCache columns_;
  mutable std::mutex mutex_;
  std::map<std::vector<IndicatorSpec>, double> scores_;
};

/// Mean rejection-CV accuracy; 0 when the features cannot be trained.
double fitness(const Chromosome& c, const LabeledSeries& training, std::size_t k);

}  // namespace fxga
