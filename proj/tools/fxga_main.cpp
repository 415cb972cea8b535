// fxga: hourly FX direction classifier with GA feature selection.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fxga/config.hpp"
#include "fxga/error.hpp"
#include "fxga/pipeline.hpp"
#include "fxga/synthetic.hpp"
#include "fxga/timeseries.hpp"

namespace {

struct Flags {
  std::string data;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> k;
  std::optional<std::size_t> generations;
  std::optional<std::size_t> population;
  std::optional<unsigned> threads;
  std::string chromosome;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--data", f.data, "Candle CSV (timestamp,open,high,low,close)");
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--seed", f.seed, "Master seed for every stochastic stage");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--k", f.k, "Cross-validation folds");
  cmd->add_option("--generations", f.generations, "GA generations");
  cmd->add_option("--population", f.population, "GA population size");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware)");
  cmd->add_option("--set", f.overrides, "Extra key=value overrides")->take_all();
}

fxga::RunConfig resolve(const Flags& f) {
  fxga::RunConfig c;
  if (!f.config.empty()) c = fxga::load_config(f.config, c);
  if (!f.data.empty()) c.data = f.data;
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (f.k) c.cv_k = *f.k;
  if (f.generations) c.ga.generations = *f.generations;
  if (f.population) c.ga.population_size = *f.population;
  if (f.threads) c.threads = *f.threads;
  if (!f.chromosome.empty()) c.chromosome = f.chromosome;
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fxga::fail(fxga::ErrorCode::InvalidConfig, "--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return c;
}

void require_data(const fxga::RunConfig& c) {
  if (c.data.empty()) fxga::fail(fxga::ErrorCode::InvalidConfig, "no data file (--data or 'data = ...')");
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

void print_stage(const char* name, const fxga::StageResult& s) {
  std::cout << name << ": CV accuracy " << s.cv.mean_accuracy << " +/- " << s.cv.accuracy_dispersion
            << ", validation accuracy " << s.validation.summary.accuracy << " (acceptance "
            << s.validation.summary.acceptance_rate << "), validation ROI " << pct(s.validation.backtest.roi)
            << " (annualized " << pct(s.validation.backtest.annualized_roi) << ")\n";
}

int ingest_check(const fxga::RunConfig& c) {
  require_data(c);
  const fxga::Series s = fxga::ingest_csv(c.data);
  const std::size_t cut = fxga::split_index(s.size(), c.split);
  std::size_t gaps = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].timestamp - s[i - 1].timestamp != std::chrono::hours(1)) ++gaps;
  std::cout << "candles: " << s.size() << "\n"
            << "first: " << fxga::format_timestamp(s[0].timestamp) << "\n"
            << "last: " << fxga::format_timestamp(s[s.size() - 1].timestamp) << "\n"
            << "non-hourly steps: " << gaps << "\n"
            << "train/validation: " << cut << "/" << s.size() - cut << "\n";
  if (cut < 2 || s.size() - cut < 2) fxga::fail(fxga::ErrorCode::EmptySplit, "split leaves an empty side");
  return 0;
}

struct SynthFlags {
  std::string out;
  std::size_t candles = 8000;
  std::uint64_t seed = 1;
  bool alternating = false;
};

int synth(const SynthFlags& f) {
  const fxga::Series s = f.alternating ? fxga::generate_alternating(f.candles)
                                       : fxga::generate_synthetic(fxga::SyntheticSpec{.candles = f.candles, .seed = f.seed});
  fxga::export_csv(f.out, s);
  std::cout << "wrote " << s.size() << " candles to " << f.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hourly FX direction classifier with genetic feature selection"};
  app.require_subcommand(1);
  Flags flags;

  auto* ingest = app.add_subcommand("ingest-check", "Validate a candle file and show the split");
  auto* baseline = app.add_subcommand("baseline", "Default indicator parameters: CV, backtests, reports");
  auto* optimize = app.add_subcommand("optimize", "GA feature search on the training split, then validation");
  auto* embed = app.add_subcommand("embed", "t-SNE of out-of-fold features coloured by posterior");
  auto* report = app.add_subcommand("report", "Print metrics tables from an output directory");
  auto* print = app.add_subcommand("print-config", "Print every setting with its resolved value");
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic hourly candle file");
  for (auto* cmd : {ingest, baseline, optimize, embed, report, print}) add_common(cmd, flags);
  SynthFlags synth_flags;
  synth_cmd->add_option("--out", synth_flags.out, "Output CSV")->required();
  synth_cmd->add_option("--candles", synth_flags.candles, "Number of candles")->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
  synth_cmd->add_option("--seed", synth_flags.seed, "Generator seed");
  synth_cmd->add_flag("--alternating", synth_flags.alternating, "Closes alternate between two levels");
  embed->add_option("--chromosome", flags.chromosome, "Chromosome JSON (default <out>/optimize/chromosome.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) return synth(synth_flags);
    const fxga::RunConfig config = resolve(flags);
    if (*print) {
      std::cout << config.canonical_text();
      std::cout << "# config_hash = " << config.hash() << "\n";
      return 0;
    }
    if (*ingest) return ingest_check(config);
    if (*report) {
      std::cout << fxga::format_report(config.out);
      return 0;
    }
    require_data(config);
    if (*baseline) {
      print_stage("baseline", fxga::run_baseline(config));
    } else if (*optimize) {
      const auto r = fxga::run_optimize(config);
      std::cout << "GA: best fitness " << r.evolution.best_fitness << " (baseline " << r.baseline_fitness << ", "
                << r.evolution.trace.evaluations << " evaluations)\n";
      print_stage("optimize", r.stage);
    } else if (*embed) {
      const auto r = fxga::run_embed(config);
      std::cout << "embedded " << r.points << " of " << r.rows << " rows, KL " << r.kl_final << " -> "
                << r.csv.string() << "\n";
    }
    return 0;
  } catch (const fxga::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fxga::is_data_error(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
