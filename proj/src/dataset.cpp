#include "fxga/dataset.hpp"

#include <algorithm>

#include "fxga/error.hpp"

namespace fxga {

Dataset make_dataset(const FeatureMatrix& features, const Series& series, std::size_t begin, std::size_t end) {
  if (features.values.rows() + features.valid_from != series.size())
    fail(ErrorCode::DimensionMismatch, "feature matrix was built for a different series");
  const std::size_t first = std::max(begin, features.valid_from);
  const std::size_t last = std::min(end, series.size() - 1);
  if (first >= last) fail(ErrorCode::InsufficientHistory, "no labelable rows after warm-up");

  Dataset ds;
  ds.x = Matrix(0, features.values.cols());
  const std::size_t n = last - first;
  ds.y.reserve(n);
  ds.timestamps.reserve(n);
  ds.candles.reserve(n);
  for (std::size_t t = first; t < last; ++t) {
    ds.x.append_row(features.values.row(t - features.valid_from));
    ds.y.push_back(series[t + 1].close - series[t].close >= 0.0 ? 1 : 0);
    ds.timestamps.push_back(series[t].timestamp);
    ds.candles.push_back(t);
  }
  return ds;
}

Dataset make_dataset(const FeatureMatrix& features, const Series& series) {
  return make_dataset(features, series, 0, series.size());
}

}  // namespace fxga
