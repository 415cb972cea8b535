#include "fxga/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fxga/cv.hpp"
#include "fxga/dataset.hpp"
#include "fxga/error.hpp"
#include "fxga/parallel.hpp"

namespace fxga {

std::vector<IndicatorSpec> Chromosome::specs() const {
  std::vector<IndicatorSpec> out;
  for (const Gene& g : slots)
    if (g.enabled) out.push_back(g.spec());
  return out;
}

std::size_t Chromosome::enabled_count() const {
  return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [](const Gene& g) { return g.enabled; }));
}

bool Chromosome::valid() const {
  if (enabled_count() == 0) return false;
  return std::all_of(slots.begin(), slots.end(), [](const Gene& g) {
    const auto in_range = [](int p) { return p >= kMinWindow && p <= kMaxWindow; };
    return in_range(g.p1) && in_range(g.p2) && in_range(g.p3) && (g.kind != IndicatorKind::MACD || g.p1 < g.p2);
  });
}

void GaConfig::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (population_size < 4) fail(ErrorCode::InvalidConfig, "population_size must be >= 4");
  if (slots == 0) fail(ErrorCode::InvalidConfig, "chromosomes need at least one slot");
  if (!rate_ok(crossover_rate) || !rate_ok(mutation_rate) || !rate_ok(hyper_mutation_rate) || !rate_ok(replacement_rate))
    fail(ErrorCode::InvalidConfig, "rates must lie in [0, 1]");
  if (replacement_rate * static_cast<double>(population_size) < 1.0)
    fail(ErrorCode::InvalidConfig, "replacement_rate * population_size must be >= 1");
  if (immigrant_count() >= population_size)
    fail(ErrorCode::InvalidConfig, "immigrants would replace the elite individual");
  if (stagnation_window == 0) fail(ErrorCode::InvalidConfig, "stagnation_window must be >= 1");
}

std::size_t GaConfig::immigrant_count() const {
  const double exact = replacement_rate * static_cast<double>(population_size);
  return static_cast<std::size_t>(std::ceil(exact - 1e-9));
}

namespace {

int random_window(Rng& rng) { return static_cast<int>(uniform_int(rng, kMinWindow, kMaxWindow)); }

void order_macd(Gene& g) {
  if (g.p1 > g.p2) std::swap(g.p1, g.p2);
  if (g.p1 == g.p2) {
    if (g.p2 < kMaxWindow) {
      ++g.p2;
    } else {
      --g.p1;
    }
  }
}

}  // namespace

Gene random_gene(Rng& rng) {
  Gene g;
  g.enabled = bernoulli(rng, 0.5);
  g.kind = kAllIndicatorKinds[static_cast<std::size_t>(uniform_int(rng, 0, kAllIndicatorKinds.size() - 1))];
  g.p1 = random_window(rng);
  g.p2 = random_window(rng);
  g.p3 = random_window(rng);
  if (g.kind == IndicatorKind::MACD) order_macd(g);
  return g;
}

Chromosome random_chromosome(std::size_t slots, Rng& rng) {
  Chromosome c;
  c.slots.reserve(slots);
  for (std::size_t i = 0; i < slots; ++i) c.slots.push_back(random_gene(rng));
  repair(c, rng);
  return c;
}

void repair(Chromosome& c, Rng& rng) {
  if (c.slots.empty()) fail(ErrorCode::InvalidConfig, "chromosome has no slots");
  for (Gene& g : c.slots) {
    g.p1 = std::clamp(g.p1, kMinWindow, kMaxWindow);
    g.p2 = std::clamp(g.p2, kMinWindow, kMaxWindow);
    g.p3 = std::clamp(g.p3, kMinWindow, kMaxWindow);
    if (g.kind == IndicatorKind::MACD) order_macd(g);
  }
  if (c.enabled_count() == 0) c.slots[static_cast<std::size_t>(uniform_int(rng, 0, c.slots.size() - 1))].enabled = true;
}

Chromosome baseline_chromosome(std::size_t slots) {
  const auto specs = default_specs();
  if (slots < specs.size()) fail(ErrorCode::InvalidConfig, "baseline needs at least six slots");
  Chromosome c;
  for (const IndicatorSpec& s : specs) {
    Gene g{true, s.kind, s.p1, s.p2 == 0 ? kMinWindow + 1 : s.p2, s.p3 == 0 ? kMinWindow : s.p3};
    c.slots.push_back(g);
  }
  while (c.slots.size() < slots) c.slots.push_back(Gene{});
  return c;
}

std::vector<std::size_t> select(std::span<const double> fitness, std::size_t count, Rng& rng) {
  if (fitness.empty()) fail(ErrorCode::EmptyInput, "selection from an empty population");
  double total = 0.0;
  for (double f : fitness) {
    if (!(f >= 0.0)) fail(ErrorCode::InvalidConfig, "fitness must be non-negative");
    total += f;
  }
  std::vector<std::size_t> out;
  out.reserve(count);
  const bool degenerate = !(total > 0.0) || !std::isfinite(total);
  for (std::size_t n = 0; n < count; ++n) {
    if (degenerate) {
      out.push_back(static_cast<std::size_t>(uniform_int(rng, 0, fitness.size() - 1)));
      continue;
    }
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t pick = fitness.size() - 1;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
      acc += fitness[i];
      if (target < acc) {
        pick = i;
        break;
      }
    }
    // Rounding can leave target >= acc at the end; fall back to the last positive entry.
    while (fitness[pick] == 0.0 && pick > 0) --pick;
    out.push_back(pick);
  }
  return out;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, double rate, Rng& rng) {
  if (a.slots.size() != b.slots.size()) fail(ErrorCode::DimensionMismatch, "parents differ in slot count");
  std::pair<Chromosome, Chromosome> kids{a, b};
  if (!bernoulli(rng, rate)) return kids;
  for (std::size_t i = 0; i < a.slots.size(); ++i)
    if (bernoulli(rng, 0.5)) std::swap(kids.first.slots[i], kids.second.slots[i]);
  repair(kids.first, rng);
  repair(kids.second, rng);
  return kids;
}

Chromosome mutate(const Chromosome& c, double rate, Rng& rng) {
  Chromosome out = c;
  for (Gene& g : out.slots)
    if (bernoulli(rng, rate)) g = random_gene(rng);
  repair(out, rng);
  return out;
}

namespace {

enum Stream : std::uint64_t { kInit = 1, kGeneration = 2 };

void evaluate(std::span<const Chromosome> individuals, std::span<double> out, const FitnessFn& fitness,
              unsigned threads) {
  parallel_for(individuals.size(), threads, [&](std::size_t i) {
    const double f = fitness(individuals[i]);
    out[i] = std::isfinite(f) && f > 0.0 ? f : 0.0;
  });
}

GenerationRecord summarize_generation(std::size_t g, std::span<const Chromosome> pop, std::span<const double> fit) {
  GenerationRecord rec;
  rec.generation = g;
  const auto best = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
  rec.max_fitness = fit[best];
  rec.min_fitness = *std::min_element(fit.begin(), fit.end());
  rec.mean_fitness = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(fit.size());
  rec.best = pop[best];
  rec.population_fitness.assign(fit.begin(), fit.end());
  return rec;
}

}  // namespace

EvolveResult evolve(const GaConfig& config, const FitnessFn& fitness, std::span<const Chromosome> seeds) {
  config.validate();
  const std::size_t n = config.population_size;
  if (seeds.size() > n) fail(ErrorCode::InvalidConfig, "more seed individuals than population slots");

  Rng init = make_rng(config.rng_seed, kInit);
  std::vector<Chromosome> population;
  population.reserve(n);
  for (const Chromosome& s : seeds) {
    if (s.slots.size() != config.slots) fail(ErrorCode::InvalidConfig, "seed individual has the wrong slot count");
    Chromosome c = s;
    repair(c, init);
    population.push_back(std::move(c));
  }
  while (population.size() < n) population.push_back(random_chromosome(config.slots, init));

  std::vector<double> fit(n, 0.0);
  evaluate(population, fit, fitness, config.threads);

  EvolveResult result;
  result.trace.evaluations = n;
  result.trace.generations.push_back(summarize_generation(0, population, fit));
  result.trace.generations.back().mutation_rate = config.mutation_rate;
  result.best = result.trace.generations.back().best;
  result.best_fitness = result.trace.generations.back().max_fitness;

  const std::size_t immigrants = config.immigrant_count();
  const std::size_t offspring_count = n - 1;

  for (std::size_t g = 1; g <= config.generations; ++g) {
    Rng rng = make_rng(config.rng_seed, kGeneration, g);
    const auto& history = result.trace.generations;
    // Stagnation: the best fitness of the previous generation is not higher
    // than it was stagnation_window generations before that.
    const bool hyper = g >= config.stagnation_window + 1 &&
                       history[g - 1].max_fitness <= history[g - 1 - config.stagnation_window].max_fitness;
    const double rate = hyper ? config.hyper_mutation_rate : config.mutation_rate;

    const auto elite = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
    const std::vector<std::size_t> parents = select(fit, offspring_count + (offspring_count % 2), rng);

    std::vector<Chromosome> children;
    children.reserve(parents.size());
    for (std::size_t i = 0; i + 1 < parents.size(); i += 2) {
      auto [x, y] = crossover(population[parents[i]], population[parents[i + 1]], config.crossover_rate, rng);
      children.push_back(mutate(x, rate, rng));
      children.push_back(mutate(y, rate, rng));
    }
    children.resize(offspring_count);
    std::vector<double> child_fit(children.size(), 0.0);
    evaluate(children, child_fit, fitness, config.threads);

    // Pool: elite first, then offspring.
    std::vector<Chromosome> pool;
    pool.reserve(n);
    pool.push_back(population[elite]);
    pool.insert(pool.end(), children.begin(), children.end());
    std::vector<double> pool_fit;
    pool_fit.reserve(n);
    pool_fit.push_back(fit[elite]);
    pool_fit.insert(pool_fit.end(), child_fit.begin(), child_fit.end());

    // Random immigrants take the places of the worst non-elite members.
    std::vector<std::size_t> order(n - 1);
    std::iota(order.begin(), order.end(), std::size_t{1});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pool_fit[a] < pool_fit[b]; });
    std::vector<std::size_t> replaced(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(immigrants));
    std::sort(replaced.begin(), replaced.end());

    std::vector<Chromosome> newcomers;
    newcomers.reserve(immigrants);
    for (std::size_t i = 0; i < immigrants; ++i) newcomers.push_back(random_chromosome(config.slots, rng));
    std::vector<double> newcomer_fit(immigrants, 0.0);
    evaluate(newcomers, newcomer_fit, fitness, config.threads);

    population = pool;
    fit = pool_fit;
    for (std::size_t i = 0; i < immigrants; ++i) {
      population[replaced[i]] = std::move(newcomers[i]);
      fit[replaced[i]] = newcomer_fit[i];
    }
    result.trace.evaluations += offspring_count + immigrants;

    GenerationRecord rec = summarize_generation(g, population, fit);
    rec.hyper_mutation = hyper;
    rec.mutation_rate = rate;
    rec.pool_fitness = std::move(pool_fit);
    rec.replaced = std::move(replaced);
    if (rec.max_fitness > result.best_fitness) {
      result.best_fitness = rec.max_fitness;
      result.best = rec.best;
    }
    result.trace.generations.push_back(std::move(rec));
  }
  return result;
}

CvFitness::CvFitness(Series training, std::size_t k, double acceptance, unsigned cv_threads)
    : training_(std::move(training)), k_(k), acceptance_(acceptance), cv_threads_(cv_threads), columns_(training_) {}

double CvFitness::operator()(const Chromosome& c) {
  const std::vector<IndicatorSpec> specs = c.specs();
  if (specs.empty()) return 0.0;
  {
    std::lock_guard lock(mutex_);
    if (auto it = scores_.find(specs); it != scores_.end()) return it->second;
  }
  double score = 0.0;
  try {
    const FeatureMatrix fm = build_matrix(columns_, specs);
    const Dataset ds = make_dataset(fm, training_);
    score = run_cv(ds, CvOptions{k_, true, acceptance_, cv_threads_}).mean_accuracy;
  } catch (const Error&) {
    score = 0.0;
  }
  std::lock_guard lock(mutex_);
  scores_.emplace(specs, score);
  return score;
}

std::size_t CvFitness::cache_size() const {
  std::lock_guard lock(mutex_);
  return scores_.size();
}

double fitness(const Chromosome& c, const LabeledSeries& training, std::size_t k) {
  CvFitness eval(training.series, k);
  return eval(c);
}

}  // namespace fxga
