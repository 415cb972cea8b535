#include "fxga/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "fxga/error.hpp"
#include "fxga/random.hpp"

namespace fxga {

Timestamp synthetic_start() {
  using namespace std::chrono;
  return sys_days{year{2013} / January / 1};
}

Series generate_synthetic(const SyntheticSpec& spec) {
  if (spec.candles < 2) fail(ErrorCode::InvalidConfig, "synthetic series needs at least two candles");
  if (spec.mean_window == 0) fail(ErrorCode::InvalidConfig, "mean_window must be positive");
  Rng rng = make_rng(spec.seed, 0x5E7);
  std::vector<Candle> candles;
  candles.reserve(spec.candles);

  double log_price = std::log(spec.start_price);
  double prev_return = 0.0;
  std::deque<double> window{log_price};
  double window_sum = log_price;
  Timestamp t = synthetic_start();

  for (std::size_t i = 0; i < spec.candles; ++i) {
    const double open = std::exp(log_price);
    const double mean = window_sum / static_cast<double>(window.size());
    const double r = spec.ar * prev_return - spec.reversion * (log_price - mean) + spec.volatility * normal(rng);
    log_price += r;
    prev_return = r;
    const double close = std::exp(log_price);
    const double wick_up = spec.volatility * std::abs(normal(rng)) * 0.5;
    const double wick_down = spec.volatility * std::abs(normal(rng)) * 0.5;
    Candle c;
    c.timestamp = t;
    c.open = open;
    c.close = close;
    c.high = std::max(open, close) * (1.0 + wick_up);
    c.low = std::min(open, close) * (1.0 - wick_down);
    candles.push_back(c);

    window.push_back(log_price);
    window_sum += log_price;
    if (window.size() > spec.mean_window) {
      window_sum -= window.front();
      window.pop_front();
    }
    t += std::chrono::hours{1};
  }
  return Series(std::move(candles));
}

Series generate_alternating(std::size_t candles, double low, double high) {
  std::vector<Candle> out;
  out.reserve(candles);
  Timestamp t = synthetic_start();
  double prev = low;
  for (std::size_t i = 0; i < candles; ++i) {
    const double close = i % 2 == 0 ? low : high;
    const double open = i == 0 ? close : prev;
    out.push_back(Candle{t, open, std::max(open, close), std::min(open, close), close});
    prev = close;
    t += std::chrono::hours{1};
  }
  return Series(std::move(out));
}

}  // namespace fxga
