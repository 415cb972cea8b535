#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fxga {

using Timestamp = std::chrono::sys_seconds;

/// One hourly OHLC observation of a quote ratio.
struct Candle {
  Timestamp timestamp{};
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;

  friend bool operator==(const Candle&, const Candle&) = default;
};

/// Chronologically ordered candles (strictly increasing timestamps, at least two).
///
/// Gaps in the hourly grid are accepted; downstream code treats rows as
/// consecutive samples.
class Series {
 public:
  explicit Series(std::vector<Candle> candles);

  std::size_t size() const noexcept { return candles_.size(); }
  const Candle& operator[](std::size_t i) const { return candles_[i]; }
  std::span<const Candle> candles() const noexcept { return candles_; }
  std::vector<double> closes() const;

  /// Candles [begin, end) as a new series; the slice must hold at least two candles.
  Series slice(std::size_t begin, std::size_t end) const;

  /// Index of the candle with exactly this timestamp, or size() when absent.
  std::size_t find(Timestamp t) const;

 private:
  std::vector<Candle> candles_;
};

/// Series plus the binary up/down target: labels[i] is the label of candle i + 1,
/// 1 when close[i+1] - close[i] >= 0 and 0 otherwise.
struct LabeledSeries {
  Series series;
  std::vector<int> labels;
};

struct SplitSpec {
  double train_fraction = 0.8;
};

struct CsvLayout {
  char delimiter = ',';
};

Timestamp parse_timestamp(std::string_view text);
/// ISO-8601 UTC, e.g. 2014-03-01T13:00:00Z.
std::string format_timestamp(Timestamp t);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);
/// Exact parse of a whole field; false on trailing garbage.
bool parse_double(std::string_view text, double& out);

/// Reads `timestamp,open,high,low,close` rows (header line required).
Series read_csv(std::istream& in, const CsvLayout& layout = {});
Series ingest_csv(const std::filesystem::path& path, const CsvLayout& layout = {});

void write_csv(std::ostream& out, const Series& series, const CsvLayout& layout = {});
void export_csv(const std::filesystem::path& path, const Series& series, const CsvLayout& layout = {});

LabeledSeries label(const Series& series);

/// Number of leading candles that go to the training side: floor(fraction * n).
std::size_t split_index(std::size_t n, const SplitSpec& spec);

/// Chronological train/validation split of the candles; no shuffling.
std::pair<LabeledSeries, LabeledSeries> split(const LabeledSeries& labeled, const SplitSpec& spec);

}  // namespace fxga
