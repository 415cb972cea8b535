#include "fxga/backtest.hpp"

#include "fxga/error.hpp"
#include "fxga/metrics.hpp"

namespace fxga {

BacktestReport simulate(const Series& series, std::span<const Signal> decisions, const BacktestOptions& options) {
  BacktestReport report;
  std::vector<Decision> kinds;
  std::vector<int> labels;
  std::vector<double> next_returns;
  kinds.reserve(decisions.size());
  labels.reserve(decisions.size());
  next_returns.reserve(decisions.size());

  double buy = 0.0;
  double sell = 0.0;
  std::size_t previous = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const Signal& s = decisions[i];
    const std::size_t t = series.find(s.timestamp);
    if (t == series.size())
      fail(ErrorCode::MisalignedDecisions, "decision at " + format_timestamp(s.timestamp) + " matches no candle");
    if (i > 0 && t <= previous) fail(ErrorCode::MisalignedDecisions, "decisions must be strictly chronological");
    previous = t;
    if (t + 1 >= series.size()) {
      if (s.decision != Decision::Rejected)
        fail(ErrorCode::MisalignedDecisions, "no exit bar for a decision on the final candle");
      continue;
    }
    const double entry = series[t].close;
    const double exit = series[t + 1].close;
    const double raw = (exit - entry) / entry;
    kinds.push_back(s.decision);
    labels.push_back(exit - entry >= 0.0 ? 1 : 0);
    next_returns.push_back(raw);

    if (report.curve.timestamps.empty()) {
      report.curve.timestamps.push_back(series[t].timestamp);
      report.curve.buy.push_back(0.0);
      report.curve.sell.push_back(0.0);
      report.curve.combined.push_back(0.0);
    }
    if (s.decision != Decision::Rejected) {
      Trade trade;
      trade.open_timestamp = series[t].timestamp;
      trade.close_timestamp = series[t + 1].timestamp;
      trade.entry_candle = t;
      trade.entry = entry;
      trade.exit = exit;
      if (s.decision == Decision::Class1) {
        trade.direction = Direction::Buy;
        trade.ret = raw - options.cost_per_trade;
        buy += 100.0 * trade.ret;
      } else {
        trade.direction = Direction::Sell;
        trade.ret = -raw - options.cost_per_trade;
        sell += 100.0 * trade.ret;
      }
      report.trades.push_back(trade);
    }
    report.curve.timestamps.push_back(series[t + 1].timestamp);
    report.curve.buy.push_back(buy);
    report.curve.sell.push_back(sell);
    report.curve.combined.push_back(buy + sell);
  }

  report.roi_buy = buy;
  report.roi_sell = sell;
  report.roi = report.curve.combined.empty() ? 0.0 : report.curve.combined.back();
  if (!report.curve.timestamps.empty()) {
    report.period = report.curve.timestamps.back() - report.curve.timestamps.front();
    report.drawdown = max_drawdown(report.curve.combined);
    report.drawdown_peak_time = report.curve.timestamps[report.drawdown.peak];
    report.drawdown_trough_time = report.curve.timestamps[report.drawdown.trough];
  }
  report.annualized_roi = report.period.count() > 0 ? annualize(report.roi, report.period) : 0.0;
  report.table = metrics_table(kinds, labels, next_returns, options.cost_per_trade);
  return report;
}

Drawdown max_drawdown(std::span<const double> curve) {
  Drawdown dd;
  if (curve.empty()) return dd;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] > curve[peak]) peak = i;
    const double drop = curve[i] - curve[peak];
    if (drop < dd.value) dd = Drawdown{drop, peak, i};
  }
  return dd;
}

double annualize(double roi, std::chrono::seconds period) {
  if (period.count() <= 0) fail(ErrorCode::InvalidConfig, "annualization period must be positive");
  const auto year = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::years{1});
  return roi * static_cast<double>(year.count()) / static_cast<double>(period.count());
}

MetricsTable metrics_table(std::span<const Decision> decisions, std::span<const int> labels,
                           std::span<const double> next_returns, double cost_per_trade) {
  if (next_returns.size() != decisions.size())
    fail(ErrorCode::LengthMismatch, "returns and decisions differ in length");
  const ConfusionSummary summary = summarize(decisions, labels);
  MetricsTable table;
  table.decisions = summary.total;
  table.accuracy = summary.accuracy;
  table.acceptance_rate = summary.acceptance_rate;
  for (std::size_t c = 0; c < 2; ++c) {
    table.per_class[c].precision = summary.per_class[c].precision;
    table.per_class[c].recall = summary.per_class[c].recall;
    table.per_class[c].trades = summary.per_class[c].predicted;
  }
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] == Decision::Class1) table.per_class[1].roi += 100.0 * (next_returns[i] - cost_per_trade);
    if (decisions[i] == Decision::Class0) table.per_class[0].roi += 100.0 * (-next_returns[i] - cost_per_trade);
  }
  table.total.precision = 0.5 * (table.per_class[0].precision + table.per_class[1].precision);
  table.total.recall = 0.5 * (table.per_class[0].recall + table.per_class[1].recall);
  table.total.roi = table.per_class[0].roi + table.per_class[1].roi;
  table.total.trades = table.per_class[0].trades + table.per_class[1].trades;
  return table;
}

}  // namespace fxga
