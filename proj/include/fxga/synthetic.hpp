#pragma once

#include <cstddef>
#include <cstdint>

#include "fxga/timeseries.hpp"

namespace fxga {

/// Hourly candles whose log returns follow an AR(1) process plus a pull back
/// toward a trailing mean:
///   r_t = ar * r_{t-1} - reversion * (log p_{t-1} - mean_w(log p)) + volatility * e_t
struct SyntheticSpec {
  std::size_t candles = 8000;
  double start_price = 1.30;
  double volatility = 1e-3;
  double ar = -0.3;
  double reversion = 0.05;
  std::size_t mean_window = 12;
  std::uint64_t seed = 1;
};

Series generate_synthetic(const SyntheticSpec& spec);

/// Closes alternate between two levels every bar, so the next move is fully
/// determined by the last one.
Series generate_alternating(std::size_t candles, double low = 1.10, double high = 1.11);

/// Unix-epoch hour grid starting 2013-01-01T00:00:00Z.
Timestamp synthetic_start();

}  // namespace fxga
