#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fxga/cv.hpp"
#include "fxga/timeseries.hpp"

namespace fxga {

enum class Direction { Buy, Sell };

/// One unit of notional opened at a bar's close and closed at the next bar's close.
struct Trade {
  Timestamp open_timestamp{};
  Timestamp close_timestamp{};
  std::size_t entry_candle = 0;
  Direction direction = Direction::Buy;
  double entry = 0.0;
  double exit = 0.0;
  double ret = 0.0;  // signed fraction of notional, net of cost
};

/// Cumulative arithmetic returns in percentage points. Point 0 is the flat
/// start at the first decision's bar; point i > 0 follows the i-th decision.
struct EquityCurve {
  std::vector<Timestamp> timestamps;
  std::vector<double> buy;
  std::vector<double> sell;
  std::vector<double> combined;
};

struct Drawdown {
  double value = 0.0;  // <= 0, percentage points
  std::size_t peak = 0;
  std::size_t trough = 0;
};

struct ClassRow {
  double precision = 0.0;
  double recall = 0.0;
  double roi = 0.0;  // percentage points earned by this class's trades
  std::size_t trades = 0;
};

/// Per-class table; class 1 trades are buys, class 0 trades are sells.
struct MetricsTable {
  std::array<ClassRow, 2> per_class{};
  ClassRow total;  // precision/recall averaged over classes, ROI summed
  double accuracy = 0.0;
  double acceptance_rate = 0.0;
  std::size_t decisions = 0;
};

struct BacktestOptions {
  double cost_per_trade = 0.0;  // fraction of notional subtracted from each trade
};

struct BacktestReport {
  std::vector<Trade> trades;
  EquityCurve curve;
  double roi = 0.0;
  double roi_buy = 0.0;
  double roi_sell = 0.0;
  double annualized_roi = 0.0;
  std::chrono::seconds period{0};
  Drawdown drawdown;
  Timestamp drawdown_peak_time{};
  Timestamp drawdown_trough_time{};
  MetricsTable table;
};

/// Trades every accepted decision for one bar. Decisions must be ordered,
/// match candle timestamps and may not trade on the final bar.
BacktestReport simulate(const Series& series, std::span<const Signal> decisions, const BacktestOptions& options = {});

Drawdown max_drawdown(std::span<const double> curve);

/// Simple proration of a return to one year.
double annualize(double roi, std::chrono::seconds period);

/// `next_returns[i]` is (close[t+1] - close[t]) / close[t] for decision row i.
MetricsTable metrics_table(std::span<const Decision> decisions, std::span<const int> labels,
                           std::span<const double> next_returns, double cost_per_trade = 0.0);

}  // namespace fxga
