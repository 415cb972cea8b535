#pragma once

#include <cstddef>
#include <vector>

#include "fxga/indicators.hpp"
#include "fxga/matrix.hpp"
#include "fxga/timeseries.hpp"

namespace fxga {

/// Supervised rows: features known at candle t paired with the direction of
/// the following bar, label 1 when close[t+1] - close[t] >= 0.
struct Dataset {
  Matrix x;
  std::vector<int> y;
  std::vector<Timestamp> timestamps;
  std::vector<std::size_t> candles;  // candle index t of each row

  std::size_t size() const noexcept { return y.size(); }
};

/// Rows for candles t in [begin, end) that are past the warm-up and have a
/// following bar. `end` is clamped to series.size() - 1.
Dataset make_dataset(const FeatureMatrix& features, const Series& series, std::size_t begin, std::size_t end);

/// All labelable rows of the series.
Dataset make_dataset(const FeatureMatrix& features, const Series& series);

}  // namespace fxga
