#include "fxga/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fxga/error.hpp"

namespace fxga {

namespace {

// NaN and infinities have no JSON representation.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(std::span<const double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(number(v));
  return arr;
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (const auto& line : header) out << "# " << line << '\n';
}

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::InvalidConfig, std::string("missing JSON field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bad JSON field '") + key + "': " + e.what());
  }
}

void check_version(const Json& j, const char* what) {
  const int v = get_field<int>(j, "format_version");
  if (v != kFormatVersion)
    fail(ErrorCode::InvalidConfig, std::string(what) + " has format_version " + std::to_string(v) + ", expected " +
                                       std::to_string(kFormatVersion));
}

IndicatorKind kind_from_json(const Json& j) {
  const auto name = get_field<std::string>(j, "indicator");
  const auto kind = indicator_from_string(name);
  if (!kind) fail(ErrorCode::InvalidConfig, "unknown indicator '" + name + "'");
  return *kind;
}

}  // namespace

Json to_json(const ArtifactMeta& meta) { return Json{{"seed", meta.seed}, {"config_hash", meta.config_hash}}; }

std::vector<std::string> header_lines(const ArtifactMeta& meta) {
  return {"seed=" + std::to_string(meta.seed), "config_hash=" + meta.config_hash};
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Class1:
      return "buy";
    case Decision::Class0:
      return "sell";
    case Decision::Rejected:
      break;
  }
  return "reject";
}

Json to_json(const IndicatorSpec& spec) {
  const IndicatorSpec s = spec.normalized();
  Json windows = Json::array();
  const int n = window_count(s.kind);
  const int w[3] = {s.p1, s.p2, s.p3};
  for (int i = 0; i < n; ++i) windows.push_back(w[i]);
  return Json{{"indicator", std::string(to_string(s.kind))}, {"windows", windows}, {"label", s.label()}};
}

IndicatorSpec spec_from_json(const Json& j) {
  IndicatorSpec s;
  s.kind = kind_from_json(j);
  const auto windows = get_field<std::vector<int>>(j, "windows");
  if (static_cast<int>(windows.size()) != window_count(s.kind))
    fail(ErrorCode::InvalidConfig, "wrong number of windows for " + std::string(to_string(s.kind)));
  s.p1 = windows[0];
  s.p2 = windows.size() > 1 ? windows[1] : 0;
  s.p3 = windows.size() > 2 ? windows[2] : 0;
  return s;
}

Json to_json(const Chromosome& c) {
  Json slots = Json::array();
  for (const Gene& g : c.slots)
    slots.push_back(Json{{"enabled", g.enabled},
                         {"indicator", std::string(to_string(g.kind))},
                         {"p1", g.p1},
                         {"p2", g.p2},
                         {"p3", g.p3}});
  Json features = Json::array();
  for (const auto& s : c.specs()) features.push_back(to_json(s));
  return Json{{"format_version", kFormatVersion}, {"slots", slots}, {"features", features}};
}

Chromosome chromosome_from_json(const Json& j) {
  check_version(j, "chromosome");
  const Json& slots = j.at("slots");
  if (!slots.is_array() || slots.empty()) fail(ErrorCode::InvalidConfig, "chromosome needs a non-empty 'slots' array");
  Chromosome c;
  for (const Json& s : slots) {
    Gene g;
    g.enabled = get_field<bool>(s, "enabled");
    g.kind = kind_from_json(s);
    g.p1 = get_field<int>(s, "p1");
    g.p2 = get_field<int>(s, "p2");
    g.p3 = get_field<int>(s, "p3");
    c.slots.push_back(g);
  }
  if (!c.valid()) fail(ErrorCode::InvalidConfig, "chromosome has no enabled slot or a window out of range");
  return c;
}

Json to_json(const RejectionModel& model, std::span<const IndicatorSpec> features) {
  const auto& st = model.model.stats();
  Json classes = Json::array();
  for (std::size_t c = 0; c < 2; ++c)
    classes.push_back(Json{{"label", static_cast<int>(c)},
                           {"prior", number(st.prior[c])},
                           {"mean", numbers(st.mean[c])},
                           {"variance", numbers(st.variance[c])}});
  Json feats = Json::array();
  for (const auto& s : features) feats.push_back(to_json(s));
  return Json{{"format_version", kFormatVersion},
              {"features", feats},
              {"classes", classes},
              {"p_rejection", number(model.p_rejection)},
              {"calibration_acceptance", number(model.calibration_acceptance)},
              {"degenerate", model.degenerate}};
}

RejectionModel rejection_model_from_json(const Json& j) {
  check_version(j, "model");
  const Json& classes = j.at("classes");
  if (!classes.is_array() || classes.size() != 2) fail(ErrorCode::InvalidConfig, "model needs two classes");
  ClassConditionalStats st;
  for (std::size_t c = 0; c < 2; ++c) {
    st.prior[c] = get_field<double>(classes[c], "prior");
    st.mean[c] = get_field<std::vector<double>>(classes[c], "mean");
    st.variance[c] = get_field<std::vector<double>>(classes[c], "variance");
  }
  RejectionModel out = make_rejection_model(FittedNaiveBayes(std::move(st)), get_field<double>(j, "p_rejection"));
  out.calibration_acceptance = get_field<double>(j, "calibration_acceptance");
  out.degenerate = get_field<bool>(j, "degenerate");
  return out;
}

Json to_json(const CvReport& report) {
  Json folds = Json::array();
  for (std::size_t f = 0; f < report.plan.folds.size(); ++f) {
    const auto [lo, hi] = report.plan.folds[f];
    folds.push_back(Json{{"begin", lo},
                         {"end", hi},
                         {"first_timestamp", format_timestamp(report.timestamps[lo])},
                         {"last_timestamp", format_timestamp(report.timestamps[hi - 1])},
                         {"accuracy", number(report.fold_accuracy[f])},
                         {"accepted", report.fold_accepted[f]},
                         {"p_rejection", number(report.fold_threshold[f])}});
  }
  Json classes = Json::array();
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& m = report.summary.per_class[c];
    classes.push_back(Json{{"label", static_cast<int>(c)},
                           {"predicted", m.predicted},
                           {"correct", m.correct},
                           {"actual", m.actual},
                           {"precision", number(m.precision)},
                           {"recall", number(m.recall)}});
  }
  return Json{{"format_version", kFormatVersion},
              {"k", report.k},
              {"rejection", report.rejection},
              {"rows", report.out_of_fold.size()},
              {"mean_accuracy", number(report.mean_accuracy)},
              {"accuracy_dispersion", number(report.accuracy_dispersion)},
              {"acceptance_rate", number(report.acceptance_rate)},
              {"accepted", report.summary.accepted},
              {"pooled_accuracy", number(report.summary.accuracy)},
              {"leakage_free", leakage_free(report)},
              {"folds", folds},
              {"classes", classes}};
}

Json to_json(const MetricsTable& table) {
  auto row = [](const ClassRow& r) {
    return Json{{"precision", number(r.precision)}, {"recall", number(r.recall)}, {"roi", number(r.roi)},
                {"trades", r.trades}};
  };
  Json out{{"class_0", row(table.per_class[0])}, {"class_1", row(table.per_class[1])}, {"total", row(table.total)}};
  out["accuracy"] = number(table.accuracy);
  out["acceptance_rate"] = number(table.acceptance_rate);
  out["decisions"] = table.decisions;
  return out;
}

Json to_json(const BacktestReport& report) {
  Json out{{"format_version", kFormatVersion},
           {"trades", report.trades.size()},
           {"roi", number(report.roi)},
           {"roi_buy", number(report.roi_buy)},
           {"roi_sell", number(report.roi_sell)},
           {"annualized_roi", number(report.annualized_roi)},
           {"period_seconds", report.period.count()}};
  if (!report.curve.timestamps.empty()) {
    out["first_timestamp"] = format_timestamp(report.curve.timestamps.front());
    out["last_timestamp"] = format_timestamp(report.curve.timestamps.back());
  }
  out["max_drawdown"] = Json{{"value", number(report.drawdown.value)},
                             {"peak_timestamp", format_timestamp(report.drawdown_peak_time)},
                             {"trough_timestamp", format_timestamp(report.drawdown_trough_time)}};
  out["table"] = to_json(report.table);
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_trace_csv(std::ostream& out, const GaTrace& trace, const std::vector<std::string>& header) {
  write_header(out, header);
  out << "generation,max_fitness,mean_fitness,min_fitness,hyper_mutation,mutation_rate,replaced,features\n";
  for (const auto& g : trace.generations) {
    std::string feats;
    for (const auto& s : g.best.specs()) {
      if (!feats.empty()) feats += ' ';
      feats += s.label();
    }
    out << g.generation << ',' << format_double(g.max_fitness) << ',' << format_double(g.mean_fitness) << ','
        << format_double(g.min_fitness) << ',' << (g.hyper_mutation ? 1 : 0) << ',' << format_double(g.mutation_rate)
        << ',' << g.replaced.size() << ",\"" << feats << "\"\n";
  }
}

void write_signals_csv(std::ostream& out, std::span<const Signal> signals, const std::vector<std::string>& header) {
  write_header(out, header);
  out << "timestamp,decision,posterior\n";
  for (const Signal& s : signals)
    out << format_timestamp(s.timestamp) << ',' << to_string(s.decision) << ',' << format_double(s.posterior) << '\n';
}

std::vector<Signal> read_signals_csv(std::istream& in, const Series& series) {
  std::vector<Signal> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "timestamp,decision,posterior") throw Error(ErrorCode::MalformedRow, "unexpected signal header", line_no);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string ts, decision, posterior;
    if (!std::getline(ss, ts, ',') || !std::getline(ss, decision, ',') || !std::getline(ss, posterior))
      throw Error(ErrorCode::MalformedRow, "expected three fields", line_no);
    Signal s;
    s.timestamp = parse_timestamp(ts);
    s.candle = series.find(s.timestamp);
    if (decision == "buy") {
      s.decision = Decision::Class1;
    } else if (decision == "sell") {
      s.decision = Decision::Class0;
    } else if (decision == "reject") {
      s.decision = Decision::Rejected;
    } else {
      throw Error(ErrorCode::MalformedRow, "unknown decision '" + decision + "'", line_no);
    }
    if (!parse_double(posterior, s.posterior)) throw Error(ErrorCode::MalformedRow, "bad posterior", line_no);
    out.push_back(s);
  }
  return out;
}

void write_equity_csv(std::ostream& out, const EquityCurve& curve, const std::vector<std::string>& header) {
  write_header(out, header);
  out << "timestamp,buy,sell,combined\n";
  for (std::size_t i = 0; i < curve.timestamps.size(); ++i)
    out << format_timestamp(curve.timestamps[i]) << ',' << format_double(curve.buy[i]) << ','
        << format_double(curve.sell[i]) << ',' << format_double(curve.combined[i]) << '\n';
}

}  // namespace fxga
