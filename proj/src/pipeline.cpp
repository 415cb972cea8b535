#include "fxga/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "fxga/dataset.hpp"
#include "fxga/error.hpp"
#include "fxga/plot.hpp"
#include "fxga/random.hpp"
#include "fxga/tsne.hpp"

namespace fxga {

namespace {

enum Stream : std::uint64_t { kGa = 1, kEmbedding = 2, kSubsample = 3 };

std::size_t checked_split(std::size_t n, const SplitSpec& split) {
  const std::size_t cut = split_index(n, split);
  if (cut < 2 || n - cut < 2) fail(ErrorCode::EmptySplit, "split of " + std::to_string(n) + " rows leaves an empty side");
  return cut;
}

std::vector<Signal> signals_for(const Dataset& ds, std::span<const Prediction> predictions) {
  std::vector<Signal> out(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r)
    out[r] = Signal{ds.timestamps[r], ds.candles[r], predictions[r].decision, predictions[r].posterior};
  return out;
}

Json feature_list(std::span<const IndicatorSpec> specs) {
  Json arr = Json::array();
  for (const auto& s : specs) arr.push_back(to_json(s));
  return arr;
}

Json with_meta(Json j, const ArtifactMeta& meta) {
  j["meta"] = to_json(meta);
  return j;
}

void write_stage(const std::filesystem::path& dir, const std::string& name, const StageResult& stage,
                 const StagedData& data, const ArtifactMeta& meta) {
  const auto header = header_lines(meta);
  write_json(dir / "cv_report.json", with_meta(to_json(stage.cv), meta));
  write_json(dir / "backtest_train.json", with_meta(to_json(stage.train_backtest), meta));
  write_json(dir / "backtest_validation.json", with_meta(to_json(stage.validation.backtest), meta));
  write_json(dir / "model.json", with_meta(to_json(stage.model, stage.features), meta));

  {
    auto out = open_output(dir / "signals_train.csv");
    write_signals_csv(out, stage.train_signals, header);
  }
  {
    auto out = open_output(dir / "signals_validation.csv");
    write_signals_csv(out, stage.validation.signals, header);
  }
  {
    auto out = open_output(dir / "equity_train.csv");
    write_equity_csv(out, stage.train_backtest.curve, header);
  }
  {
    auto out = open_output(dir / "equity_validation.csv");
    write_equity_csv(out, stage.validation.backtest.curve, header);
  }
  {
    auto out = open_output(dir / "equity_train.svg");
    write_equity_svg(out, stage.train_backtest, name + ": training (out-of-fold)");
  }
  {
    auto out = open_output(dir / "equity_validation.svg");
    write_equity_svg(out, stage.validation.backtest, name + ": validation");
  }

  const auto& v = stage.validation;
  Json report{{"format_version", kFormatVersion},
              {"stage", name},
              {"meta", to_json(meta)},
              {"data",
               {{"candles", data.size()},
                {"train_candles", data.split_index()},
                {"validation_candles", data.size() - data.split_index()},
                {"first_timestamp", format_timestamp(data.training()[0].timestamp)},
                {"split_timestamp", v.signals.empty() ? std::string() : format_timestamp(v.signals.front().timestamp)}}},
              {"features", feature_list(stage.features)},
              {"leakage_free", leakage_free(stage.cv)},
              {"validation_access_count", stage.validation_accesses},
              {"cv",
               {{"k", stage.cv.k},
                {"mean_accuracy", stage.cv.mean_accuracy},
                {"accuracy_dispersion", stage.cv.accuracy_dispersion},
                {"acceptance_rate", stage.cv.acceptance_rate}}},
              {"train", to_json(stage.train_backtest)},
              {"validation",
               {{"rows", v.rows},
                {"accuracy", v.summary.accuracy},
                {"acceptance_rate", v.summary.acceptance_rate},
                {"p_rejection", stage.model.p_rejection},
                {"backtest", to_json(v.backtest)}}}};
  write_json(dir / "report.json", report);
}

}  // namespace

StagedData::StagedData(Series full, const SplitSpec& split)
    : full_(std::move(full)),
      training_(full_.slice(0, checked_split(full_.size(), split))),
      split_(training_.size()) {}

const Series& StagedData::open_validation() {
  if (accesses_ > 0) fail(ErrorCode::InvalidConfig, "the validation split was already read");
  ++accesses_;
  return full_;
}

ArtifactMeta artifact_meta(const RunConfig& config) { return ArtifactMeta{config.require_seed(), config.hash()}; }

StageResult evaluate_features(StagedData& data, const std::vector<IndicatorSpec>& features, const RunConfig& config) {
  const Series& train = data.training();
  const FeatureMatrix train_features = build_matrix(train, features);
  const Dataset train_ds = make_dataset(train_features, train);

  CvReport cv = run_cv(train_ds, CvOptions{config.cv_k, true, config.acceptance, config.threads});
  std::vector<Signal> train_signals = out_of_fold_signal(cv);
  const BacktestOptions bt{config.cost_per_trade};
  BacktestReport train_bt = simulate(train, train_signals, bt);

  RejectionModel model = calibrate_rejection(fit(train_ds.x, train_ds.y), train_ds.x, config.acceptance);

  // Indicators are causal, so validation rows may use the training candles as history.
  const Series& full = data.open_validation();
  const FeatureMatrix full_features = build_matrix(full, features);
  const Dataset valid_ds = make_dataset(full_features, full, data.split_index(), full.size());
  if (valid_ds.size() == 0) fail(ErrorCode::EmptySplit, "no validation rows");

  std::vector<Prediction> predictions(valid_ds.size());
  std::vector<Decision> decisions(valid_ds.size());
  for (std::size_t r = 0; r < valid_ds.size(); ++r) {
    predictions[r] = predict_with_rejection(model, valid_ds.x.row(r));
    decisions[r] = predictions[r].decision;
  }
  ValidationResult validation;
  validation.rows = valid_ds.size();
  validation.signals = signals_for(valid_ds, predictions);
  validation.summary = summarize(decisions, valid_ds.y);
  validation.backtest = simulate(full, validation.signals, bt);

  return StageResult{features,          std::move(cv),         std::move(train_signals),
                     std::move(train_bt), std::move(model),    std::move(validation),
                     data.validation_accesses()};
}

StageResult run_baseline(const RunConfig& config) {
  config.validate();
  const ArtifactMeta meta = artifact_meta(config);
  StagedData data(ingest_csv(config.data), config.split);
  StageResult stage = evaluate_features(data, default_specs(), config);
  write_stage(config.out / "baseline", "baseline", stage, data, meta);
  return stage;
}

OptimizeResult run_optimize(const RunConfig& config) {
  config.validate();
  const ArtifactMeta meta = artifact_meta(config);
  StagedData data(ingest_csv(config.data), config.split);

  GaConfig ga = config.ga;
  ga.rng_seed = derive_seed(meta.seed, kGa);
  ga.threads = config.threads;
  // Fitness only ever sees the training candles.
  CvFitness fitness(data.training(), config.cv_k, config.acceptance);
  const Chromosome baseline = baseline_chromosome(ga.slots);
  const std::vector<Chromosome> seeds{baseline};
  EvolveResult evolution = evolve(ga, [&](const Chromosome& c) { return fitness(c); }, seeds);
  const double baseline_fitness = fitness(baseline);

  StageResult stage = evaluate_features(data, evolution.best.specs(), config);
  const auto dir = config.out / "optimize";
  write_stage(dir, "optimize", stage, data, meta);
  write_json(dir / "chromosome.json", with_meta(to_json(evolution.best), meta));
  {
    auto out = open_output(dir / "ga_trace.csv");
    write_trace_csv(out, evolution.trace, header_lines(meta));
  }
  Json ga_summary{{"format_version", kFormatVersion},
                  {"meta", to_json(meta)},
                  {"population", ga.population_size},
                  {"generations", ga.generations},
                  {"evaluations", evolution.trace.evaluations},
                  {"best_fitness", evolution.best_fitness},
                  {"baseline_fitness", baseline_fitness},
                  {"features", feature_list(stage.features)}};
  write_json(dir / "ga_summary.json", ga_summary);
  return OptimizeResult{std::move(stage), std::move(evolution), baseline_fitness};
}

std::vector<std::size_t> subsample(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (count >= n) return idx;
  Rng rng = make_rng(seed, kSubsample);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

EmbedResult run_embed(const RunConfig& config) {
  config.validate();
  const ArtifactMeta meta = artifact_meta(config);
  const auto chromosome_path = config.chromosome.empty() ? config.out / "optimize" / "chromosome.json" : config.chromosome;
  const Chromosome chromosome = chromosome_from_json(read_json(chromosome_path));

  StagedData data(ingest_csv(config.data), config.split);
  const Series& train = data.training();
  const auto features = chromosome.specs();
  const Dataset ds = make_dataset(build_matrix(train, features), train);
  const CvReport cv = run_cv(ds, CvOptions{config.cv_k, true, config.acceptance, config.threads});

  const auto rows = subsample(ds.size(), config.tsne.max_points, derive_seed(meta.seed, kSubsample));
  Matrix x(0, ds.x.cols());
  std::vector<double> posteriors;
  std::vector<Timestamp> timestamps;
  for (std::size_t r : rows) {
    x.append_row(ds.x.row(r));
    posteriors.push_back(cv.out_of_fold[r].posterior);
    timestamps.push_back(ds.timestamps[r]);
  }

  EmbeddingConfig tsne = config.tsne;
  tsne.rng_seed = derive_seed(meta.seed, kEmbedding);
  tsne.threads = config.threads;
  tsne.validate(x.rows());
  const Affinities p = affinities(x, tsne.perplexity, tsne.threads);
  const Embedding emb = optimize(p.p, tsne);

  const auto dir = config.out / "embed";
  std::vector<std::string> header = header_lines(meta);
  header.push_back("features=" + [&] {
    std::string s;
    for (const auto& f : features) s += (s.empty() ? "" : " ") + f.label();
    return s;
  }());
  header.push_back("tsne " + tsne.describe());
  std::filesystem::create_directories(dir);
  export_embedding(dir / "embedding", emb.y, posteriors, timestamps, header);

  EmbedResult result;
  result.rows = ds.size();
  result.points = x.rows();
  result.kl_after_exaggeration = emb.kl[std::min(tsne.exaggeration_iterations, emb.kl.size() - 1)];
  result.kl_final = emb.kl.back();
  result.csv = dir / "embedding.csv";

  Json report{{"format_version", kFormatVersion},
              {"meta", to_json(meta)},
              {"features", feature_list(features)},
              {"rows", result.rows},
              {"points", result.points},
              {"tsne", tsne.describe()},
              {"kl_after_exaggeration", result.kl_after_exaggeration},
              {"kl_final", result.kl_final}};
  write_json(dir / "report.json", report);
  return result;
}

namespace {

std::string fmt(double v, int decimals) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void table_block(std::ostringstream& os, const std::string& title, const Json& bt) {
  os << "  " << title << "\n";
  os << "    " << "class    precision  recall   ROI(%)   trades\n";
  const Json& t = bt.at("table");
  auto line = [&](const char* name, const Json& row) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "    %-8s %-10s %-8s %-8s %s\n", name,
                  fmt(row.at("precision").is_number() ? row.at("precision").get<double>() : NAN, 4).c_str(),
                  fmt(row.at("recall").is_number() ? row.at("recall").get<double>() : NAN, 4).c_str(),
                  fmt(row.at("roi").is_number() ? row.at("roi").get<double>() : NAN, 2).c_str(),
                  std::to_string(row.at("trades").get<std::size_t>()).c_str());
    os << buf;
  };
  line("0 (sell)", t.at("class_0"));
  line("1 (buy)", t.at("class_1"));
  line("total", t.at("total"));
  auto num = [&](const char* key) { return bt.at(key).is_number() ? bt.at(key).get<double>() : NAN; };
  os << "    accuracy " << fmt(t.at("accuracy").get<double>(), 4) << ", acceptance "
     << fmt(t.at("acceptance_rate").get<double>(), 4) << ", annualized ROI " << fmt(num("annualized_roi"), 2)
     << "%, max drawdown " << fmt(bt.at("max_drawdown").at("value").get<double>(), 2) << "%\n";
}

}  // namespace

std::string format_report(const std::filesystem::path& out) {
  std::ostringstream os;
  bool any = false;
  for (const char* stage : {"baseline", "optimize"}) {
    const auto path = out / stage / "report.json";
    if (!std::filesystem::exists(path)) continue;
    any = true;
    const Json r = read_json(path);
    os << stage << " (seed " << r.at("meta").at("seed").get<std::uint64_t>() << ", config "
       << r.at("meta").at("config_hash").get<std::string>() << ")\n  features:";
    for (const auto& f : r.at("features")) os << ' ' << f.at("label").get<std::string>();
    const Json& cv = r.at("cv");
    os << "\n  CV accuracy " << fmt(cv.at("mean_accuracy").get<double>(), 4) << " +/- "
       << fmt(cv.at("accuracy_dispersion").get<double>(), 4) << " (k=" << cv.at("k").get<std::size_t>()
       << ", acceptance " << fmt(cv.at("acceptance_rate").get<double>(), 4) << ")\n";
    table_block(os, "training, out-of-fold", r.at("train"));
    table_block(os, "validation", r.at("validation").at("backtest"));
    os << "\n";
  }
  if (!any) fail(ErrorCode::IoError, "no stage reports under " + out.string());
  return os.str();
}

}  // namespace fxga
