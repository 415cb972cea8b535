#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fxga/matrix.hpp"
#include "fxga/timeseries.hpp"

namespace fxga {

enum class IndicatorKind { RSI, CCI, MACD, ROC, STOCH, ATR };

inline constexpr std::array<IndicatorKind, 6> kAllIndicatorKinds{
    IndicatorKind::RSI, IndicatorKind::CCI, IndicatorKind::MACD,
    IndicatorKind::ROC, IndicatorKind::STOCH, IndicatorKind::ATR};

// Bounds of the window genes explored by the feature search.
inline constexpr int kMinWindow = 2;
inline constexpr int kMaxWindow = 200;

std::string_view to_string(IndicatorKind kind);
std::optional<IndicatorKind> indicator_from_string(std::string_view name);

/// Number of window parameters the indicator reads (1..3).
int window_count(IndicatorKind kind);

/// An indicator plus its window parameters. Windows beyond window_count(kind)
/// are ignored; normalized() zeroes them so equal features compare equal.
struct IndicatorSpec {
  IndicatorKind kind = IndicatorKind::RSI;
  int p1 = 14;
  int p2 = 0;
  int p3 = 0;

  IndicatorSpec normalized() const;
  /// Index of the first bar at which the indicator is defined.
  std::size_t warm_up() const;
  /// Checks the search-space invariants: windows in [2, 200], MACD fast < slow.
  void validate() const;
  std::string label() const;

  friend auto operator<=>(const IndicatorSpec&, const IndicatorSpec&) = default;
};

/// RSI 14, CCI 20, MACD 12/26/9, ROC 12, STOCH 14/3, ATR 14.
std::vector<IndicatorSpec> default_specs();

/// One per-bar indicator column. Entries before valid_from are NaN.
struct Column {
  std::vector<double> values;
  std::size_t valid_from = 0;
};

Column rsi(const Series& series, int period);
Column cci(const Series& series, int period);
/// MACD histogram: (EMA fast - EMA slow) minus its EMA over `signal` bars.
Column macd(const Series& series, int fast, int slow, int signal);
Column roc(const Series& series, int period);
/// Raw %K; stochastic() returns its SMA-smoothed %D.
Column stochastic_k(const Series& series, int lookback);
Column stochastic(const Series& series, int lookback, int smooth);
/// Wilder ATR divided by the close.
Column atr(const Series& series, int period);

Column compute(const Series& series, const IndicatorSpec& spec);

/// Memoizes columns for one fixed series; safe for concurrent use.
class ColumnCache {
 public:
  explicit ColumnCache(const Series& series) : series_(&series) {}
  std::shared_ptr<const Column> get(const IndicatorSpec& spec);
  const Series& series() const { return *series_; }
  std::size_t size() const;

 private:
  const Series* series_;
  mutable std::mutex mutex_;
  std::map<IndicatorSpec, std::shared_ptr<const Column>> columns_;
};

/// Indicator values for candles [valid_from, series.size()); row r belongs to
/// candle valid_from + r and every stored value is finite.
struct FeatureMatrix {
  std::vector<IndicatorSpec> specs;
  Matrix values;
  std::size_t valid_from = 0;

  std::size_t candle_index(std::size_t row) const { return valid_from + row; }
};

FeatureMatrix build_matrix(const Series& series, std::span<const IndicatorSpec> specs);
/// Same as above but reuses cached columns; the cache must belong to `series`.
FeatureMatrix build_matrix(ColumnCache& cache, std::span<const IndicatorSpec> specs);

}  // namespace fxga
