#include "fxga/timeseries.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "fxga/error.hpp"

namespace fxga {

namespace {

void check_candle(const Candle& c, std::optional<std::size_t> line) {
  const bool finite = std::isfinite(c.open) && std::isfinite(c.high) && std::isfinite(c.low) &&
                      std::isfinite(c.close);
  if (!finite) throw Error(ErrorCode::MalformedRow, "non-finite price", line);
  if (c.open <= 0 || c.high <= 0 || c.low <= 0 || c.close <= 0)
    throw Error(ErrorCode::NonPositivePrice, "prices must be > 0", line);
  if (c.low > c.high || c.low > std::min(c.open, c.close) || c.high < std::max(c.open, c.close))
    throw Error(ErrorCode::MalformedRow, "low/high do not bracket open/close", line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Series::Series(std::vector<Candle> candles) : candles_(std::move(candles)) {
  if (candles_.size() < 2) fail(ErrorCode::SeriesTooShort, "a series needs at least two candles");
  for (std::size_t i = 0; i < candles_.size(); ++i) {
    check_candle(candles_[i], std::nullopt);
    if (i > 0 && candles_[i].timestamp <= candles_[i - 1].timestamp)
      fail(ErrorCode::NonMonotonicTimestamp, "timestamps must be strictly increasing at index " + std::to_string(i));
  }
}

std::vector<double> Series::closes() const {
  std::vector<double> out(candles_.size());
  std::transform(candles_.begin(), candles_.end(), out.begin(), [](const Candle& c) { return c.close; });
  return out;
}

Series Series::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > candles_.size()) fail(ErrorCode::EmptySplit, "slice out of range");
  return Series(std::vector<Candle>(candles_.begin() + static_cast<std::ptrdiff_t>(begin),
                                    candles_.begin() + static_cast<std::ptrdiff_t>(end)));
}

std::size_t Series::find(Timestamp t) const {
  const auto it = std::lower_bound(candles_.begin(), candles_.end(), t,
                                   [](const Candle& c, Timestamp ts) { return c.timestamp < ts; });
  if (it == candles_.end() || it->timestamp != t) return candles_.size();
  return static_cast<std::size_t>(it - candles_.begin());
}

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DD[T| ]HH:MM[:SS][Z|+00:00]
  auto bad = [&]() -> Timestamp {
    fail(ErrorCode::MalformedRow, "bad timestamp '" + std::string(text) + "'");
  };
  std::string_view s = trim(text);
  if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') return bad();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) || !parse_int(s.substr(8, 2), d) ||
      !parse_int(s.substr(11, 2), h) || !parse_int(s.substr(14, 2), mi))
    return bad();
  std::string_view rest = s.substr(16);
  if (!rest.empty() && rest.front() == ':') {
    if (rest.size() < 3 || !parse_int(rest.substr(1, 2), sec)) return bad();
    rest.remove_prefix(3);
  }
  if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return bad();
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59 || h < 0 || mi < 0 || sec < 0) return bad();
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} + std::chrono::seconds{sec};
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf.data();
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

Series read_csv(std::istream& in, const CsvLayout& layout) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<Candle> candles;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (!have_header) {
      const auto fields = split_fields(view, layout.delimiter);
      const std::array<std::string_view, 5> expected{"timestamp", "open", "high", "low", "close"};
      if (fields.size() != expected.size() || !std::equal(fields.begin(), fields.end(), expected.begin()))
        throw Error(ErrorCode::MalformedRow, "expected header timestamp,open,high,low,close", line_no);
      have_header = true;
      continue;
    }
    if (view.empty()) continue;
    const auto fields = split_fields(view, layout.delimiter);
    if (fields.size() != 5) throw Error(ErrorCode::MalformedRow, "expected 5 fields", line_no);
    Candle c;
    try {
      c.timestamp = parse_timestamp(fields[0]);
    } catch (const Error&) {
      throw Error(ErrorCode::MalformedRow, "bad timestamp", line_no);
    }
    if (!parse_double(fields[1], c.open) || !parse_double(fields[2], c.high) || !parse_double(fields[3], c.low) ||
        !parse_double(fields[4], c.close))
      throw Error(ErrorCode::MalformedRow, "bad price field", line_no);
    check_candle(c, line_no);
    if (!candles.empty() && c.timestamp <= candles.back().timestamp)
      throw Error(ErrorCode::NonMonotonicTimestamp, "timestamp not after previous row", line_no);
    candles.push_back(c);
  }
  if (!have_header) throw Error(ErrorCode::MalformedRow, "missing header", 1);
  return Series(std::move(candles));
}

Series ingest_csv(const std::filesystem::path& path, const CsvLayout& layout) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return read_csv(in, layout);
}

void write_csv(std::ostream& out, const Series& series, const CsvLayout& layout) {
  const char d = layout.delimiter;
  out << "timestamp" << d << "open" << d << "high" << d << "low" << d << "close\n";
  for (const Candle& c : series.candles()) {
    out << format_timestamp(c.timestamp) << d << format_double(c.open) << d << format_double(c.high) << d
        << format_double(c.low) << d << format_double(c.close) << '\n';
  }
}

void export_csv(const std::filesystem::path& path, const Series& series, const CsvLayout& layout) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  write_csv(out, series, layout);
}

LabeledSeries label(const Series& series) {
  if (series.size() < 2) fail(ErrorCode::SeriesTooShort, "labeling needs at least two candles");
  std::vector<int> labels(series.size() - 1);
  for (std::size_t t = 1; t < series.size(); ++t) labels[t - 1] = (series[t].close - series[t - 1].close >= 0.0) ? 1 : 0;
  return LabeledSeries{series, std::move(labels)};
}

std::size_t split_index(std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    fail(ErrorCode::InvalidConfig, "train_fraction must lie in (0, 1)");
  // The epsilon keeps products like 0.29 * 100 from flooring one short.
  return static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n) + 1e-9));
}

std::pair<LabeledSeries, LabeledSeries> split(const LabeledSeries& labeled, const SplitSpec& spec) {
  const std::size_t n = labeled.series.size();
  const std::size_t cut = split_index(n, spec);
  // Each side needs two candles to carry at least one label.
  if (cut < 2 || n - cut < 2)
    fail(ErrorCode::EmptySplit, "split of " + std::to_string(n) + " rows leaves an empty side");
  return {label(labeled.series.slice(0, cut)), label(labeled.series.slice(cut, n))};
}

}  // namespace fxga
