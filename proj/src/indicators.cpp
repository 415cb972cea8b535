#include "fxga/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fxga/error.hpp"

namespace fxga {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_window(int p, int min, const char* what) {
  if (p < min) fail(ErrorCode::InvalidWindow, std::string(what) + " window must be >= " + std::to_string(min));
}

void require_history(const Series& s, std::size_t warm_up, const char* what) {
  if (warm_up >= s.size())
    fail(ErrorCode::WindowTooLong, std::string(what) + " needs more than " + std::to_string(warm_up) + " bars");
}

// Mean taken relative to the first element so a constant window averages to
// exactly that constant.
double window_mean(std::span<const double> w) {
  const double base = w.front();
  double acc = 0.0;
  for (double v : w) acc += v - base;
  return base + acc / static_cast<double>(w.size());
}

// Simple moving average over `period` defined values starting at `first`.
std::vector<double> sma_from(const std::vector<double>& x, std::size_t first, int period) {
  std::vector<double> out(x.size(), kNaN);
  const auto p = static_cast<std::size_t>(period);
  for (std::size_t t = first + p - 1; t < x.size(); ++t) out[t] = window_mean({x.data() + t + 1 - p, p});
  return out;
}

// EMA with alpha = 2 / (period + 1), seeded by the SMA of the first window of
// defined values beginning at `first`.
std::vector<double> ema_from(const std::vector<double>& x, std::size_t first, int period) {
  std::vector<double> out(x.size(), kNaN);
  const auto p = static_cast<std::size_t>(period);
  const std::size_t seed = first + p - 1;
  if (seed >= x.size()) return out;
  out[seed] = window_mean({x.data() + first, p});
  const double alpha = 2.0 / (period + 1.0);
  for (std::size_t t = seed + 1; t < x.size(); ++t) out[t] = out[t - 1] + alpha * (x[t] - out[t - 1]);
  return out;
}

}  // namespace

std::string_view to_string(IndicatorKind kind) {
  switch (kind) {
    case IndicatorKind::RSI: return "RSI";
    case IndicatorKind::CCI: return "CCI";
    case IndicatorKind::MACD: return "MACD";
    case IndicatorKind::ROC: return "ROC";
    case IndicatorKind::STOCH: return "STOCH";
    case IndicatorKind::ATR: return "ATR";
  }
  return "?";
}

std::optional<IndicatorKind> indicator_from_string(std::string_view name) {
  for (IndicatorKind k : kAllIndicatorKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

int window_count(IndicatorKind kind) {
  switch (kind) {
    case IndicatorKind::MACD: return 3;
    case IndicatorKind::STOCH: return 2;
    default: return 1;
  }
}

IndicatorSpec IndicatorSpec::normalized() const {
  IndicatorSpec s = *this;
  const int n = window_count(kind);
  if (n < 2) s.p2 = 0;
  if (n < 3) s.p3 = 0;
  return s;
}

std::size_t IndicatorSpec::warm_up() const {
  const auto w = [](int p) { return static_cast<std::size_t>(std::max(p, 0)); };
  switch (kind) {
    case IndicatorKind::RSI:
    case IndicatorKind::ROC:
    case IndicatorKind::ATR: return w(p1);
    case IndicatorKind::CCI: return w(p1) - 1;
    case IndicatorKind::MACD: return w(p2) + w(p3) - 2;
    case IndicatorKind::STOCH: return w(p1) + w(p2) - 2;
  }
  return 0;
}

void IndicatorSpec::validate() const {
  const std::array<int, 3> windows{p1, p2, p3};
  for (int i = 0; i < window_count(kind); ++i) {
    if (windows[static_cast<std::size_t>(i)] < kMinWindow || windows[static_cast<std::size_t>(i)] > kMaxWindow)
      fail(ErrorCode::InvalidWindow, label() + ": windows must lie in [2, 200]");
  }
  if (kind == IndicatorKind::MACD && p1 >= p2) fail(ErrorCode::BadWindowOrder, label() + ": fast must be < slow");
}

std::string IndicatorSpec::label() const {
  std::string out{to_string(kind)};
  out += "(" + std::to_string(p1);
  if (window_count(kind) >= 2) out += "," + std::to_string(p2);
  if (window_count(kind) >= 3) out += "," + std::to_string(p3);
  return out + ")";
}

std::vector<IndicatorSpec> default_specs() {
  return {
      {IndicatorKind::RSI, 14, 0, 0},  {IndicatorKind::CCI, 20, 0, 0},   {IndicatorKind::MACD, 12, 26, 9},
      {IndicatorKind::ROC, 12, 0, 0},  {IndicatorKind::STOCH, 14, 3, 0}, {IndicatorKind::ATR, 14, 0, 0},
  };
}

Column rsi(const Series& series, int period) {
  require_window(period, 2, "RSI");
  require_history(series, static_cast<std::size_t>(period), "RSI");
  const std::size_t n = series.size();
  const auto p = static_cast<std::size_t>(period);
  Column col{std::vector<double>(n, kNaN), p};

  double avg_gain = 0.0;
  double avg_loss = 0.0;
  for (std::size_t t = 1; t <= p; ++t) {
    const double d = series[t].close - series[t - 1].close;
    avg_gain += std::max(d, 0.0);
    avg_loss += std::max(-d, 0.0);
  }
  avg_gain /= period;
  avg_loss /= period;

  auto value = [](double g, double l) {
    if (l == 0.0) return g > 0.0 ? 100.0 : 50.0;
    return 100.0 - 100.0 / (1.0 + g / l);
  };
  col.values[p] = value(avg_gain, avg_loss);
  for (std::size_t t = p + 1; t < n; ++t) {
    const double d = series[t].close - series[t - 1].close;
    avg_gain = (avg_gain * (period - 1) + std::max(d, 0.0)) / period;
    avg_loss = (avg_loss * (period - 1) + std::max(-d, 0.0)) / period;
    col.values[t] = value(avg_gain, avg_loss);
  }
  return col;
}

Column cci(const Series& series, int period) {
  require_window(period, 2, "CCI");
  const auto p = static_cast<std::size_t>(period);
  require_history(series, p - 1, "CCI");
  const std::size_t n = series.size();
  std::vector<double> tp(n);
  for (std::size_t t = 0; t < n; ++t) tp[t] = (series[t].high + series[t].low + series[t].close) / 3.0;

  Column col{std::vector<double>(n, kNaN), p - 1};
  for (std::size_t t = p - 1; t < n; ++t) {
    const std::span<const double> w{tp.data() + t + 1 - p, p};
    const double mean = window_mean(w);
    double mad = 0.0;
    for (double v : w) mad += std::abs(v - mean);
    mad /= period;
    col.values[t] = mad == 0.0 ? 0.0 : (tp[t] - mean) / (0.015 * mad);
  }
  return col;
}

Column macd(const Series& series, int fast, int slow, int signal) {
  require_window(fast, 2, "MACD fast");
  require_window(slow, 2, "MACD slow");
  require_window(signal, 1, "MACD signal");
  if (fast >= slow) fail(ErrorCode::BadWindowOrder, "MACD fast window must be shorter than slow window");
  const auto slow_seed = static_cast<std::size_t>(slow) - 1;
  require_history(series, slow_seed + static_cast<std::size_t>(signal) - 1, "MACD");

  const std::vector<double> close = series.closes();
  const std::vector<double> ema_fast = ema_from(close, 0, fast);
  const std::vector<double> ema_slow = ema_from(close, 0, slow);
  std::vector<double> line(close.size(), kNaN);
  for (std::size_t t = slow_seed; t < close.size(); ++t) line[t] = ema_fast[t] - ema_slow[t];
  const std::vector<double> sig = ema_from(line, slow_seed, signal);

  Column col{std::vector<double>(close.size(), kNaN), slow_seed + static_cast<std::size_t>(signal) - 1};
  for (std::size_t t = col.valid_from; t < close.size(); ++t) col.values[t] = line[t] - sig[t];
  return col;
}

Column roc(const Series& series, int period) {
  require_window(period, 1, "ROC");
  const auto p = static_cast<std::size_t>(period);
  require_history(series, p, "ROC");
  Column col{std::vector<double>(series.size(), kNaN), p};
  for (std::size_t t = p; t < series.size(); ++t) {
    const double past = series[t - p].close;
    col.values[t] = 100.0 * (series[t].close - past) / past;
  }
  return col;
}

Column stochastic_k(const Series& series, int lookback) {
  require_window(lookback, 2, "STOCH lookback");
  const auto p = static_cast<std::size_t>(lookback);
  require_history(series, p - 1, "STOCH");
  Column col{std::vector<double>(series.size(), kNaN), p - 1};
  for (std::size_t t = p - 1; t < series.size(); ++t) {
    double hh = series[t].high;
    double ll = series[t].low;
    for (std::size_t i = t + 1 - p; i < t; ++i) {
      hh = std::max(hh, series[i].high);
      ll = std::min(ll, series[i].low);
    }
    col.values[t] = hh == ll ? 50.0 : 100.0 * (series[t].close - ll) / (hh - ll);
  }
  return col;
}

Column stochastic(const Series& series, int lookback, int smooth) {
  require_window(smooth, 1, "STOCH smoothing");
  require_history(series, static_cast<std::size_t>(lookback + smooth - 2), "STOCH");
  const Column k = stochastic_k(series, lookback);
  Column col{sma_from(k.values, k.valid_from, smooth), k.valid_from + static_cast<std::size_t>(smooth) - 1};
  return col;
}

Column atr(const Series& series, int period) {
  require_window(period, 2, "ATR");
  const auto p = static_cast<std::size_t>(period);
  require_history(series, p, "ATR");
  const std::size_t n = series.size();
  auto true_range = [&](std::size_t t) {
    const double prev = series[t - 1].close;
    return std::max({series[t].high - series[t].low, std::abs(series[t].high - prev), std::abs(series[t].low - prev)});
  };
  Column col{std::vector<double>(n, kNaN), p};
  double avg = 0.0;
  for (std::size_t t = 1; t <= p; ++t) avg += true_range(t);
  avg /= period;
  col.values[p] = avg / series[p].close;
  for (std::size_t t = p + 1; t < n; ++t) {
    avg = (avg * (period - 1) + true_range(t)) / period;
    col.values[t] = avg / series[t].close;
  }
  return col;
}

Column compute(const Series& series, const IndicatorSpec& spec) {
  switch (spec.kind) {
    case IndicatorKind::RSI: return rsi(series, spec.p1);
    case IndicatorKind::CCI: return cci(series, spec.p1);
    case IndicatorKind::MACD: return macd(series, spec.p1, spec.p2, spec.p3);
    case IndicatorKind::ROC: return roc(series, spec.p1);
    case IndicatorKind::STOCH: return stochastic(series, spec.p1, spec.p2);
    case IndicatorKind::ATR: return atr(series, spec.p1);
  }
  fail(ErrorCode::InvalidConfig, "unknown indicator kind");
}

std::shared_ptr<const Column> ColumnCache::get(const IndicatorSpec& spec) {
  const IndicatorSpec key = spec.normalized();
  {
    std::lock_guard lock(mutex_);
    if (auto it = columns_.find(key); it != columns_.end()) return it->second;
  }
  // Computed outside the lock; a racing duplicate computes the same column.
  auto column = std::make_shared<const Column>(compute(*series_, key));
  std::lock_guard lock(mutex_);
  return columns_.emplace(key, std::move(column)).first->second;
}

std::size_t ColumnCache::size() const {
  std::lock_guard lock(mutex_);
  return columns_.size();
}

namespace {

template <class GetColumn>
FeatureMatrix assemble(const Series& series, std::span<const IndicatorSpec> specs, GetColumn&& get) {
  if (specs.empty()) fail(ErrorCode::EmptyInput, "feature matrix needs at least one indicator");
  std::size_t valid_from = 0;
  for (const IndicatorSpec& s : specs) valid_from = std::max(valid_from, s.warm_up());
  if (valid_from >= series.size())
    fail(ErrorCode::InsufficientHistory, "warm-up of " + std::to_string(valid_from) + " bars leaves no rows");

  FeatureMatrix fm;
  fm.specs.assign(specs.begin(), specs.end());
  fm.valid_from = valid_from;
  fm.values = Matrix(series.size() - valid_from, specs.size());
  for (std::size_t c = 0; c < specs.size(); ++c) {
    const auto column = get(specs[c]);
    for (std::size_t r = 0; r < fm.values.rows(); ++r) fm.values(r, c) = column->values[valid_from + r];
  }
  return fm;
}

}  // namespace

FeatureMatrix build_matrix(const Series& series, std::span<const IndicatorSpec> specs) {
  return assemble(series, specs, [&](const IndicatorSpec& s) { return std::make_shared<const Column>(compute(series, s)); });
}

FeatureMatrix build_matrix(ColumnCache& cache, std::span<const IndicatorSpec> specs) {
  return assemble(cache.series(), specs, [&](const IndicatorSpec& s) { return cache.get(s); });
}

}  // namespace fxga
