#include "fxga/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fxga/backtest.hpp"
#include "fxga/tsne.hpp"

namespace fxga {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Scale {
  double lo;
  double hi;
  double px_lo;
  double px_hi;
  double operator()(double v) const {
    const double span = hi - lo;
    const double f = span > 0.0 ? (v - lo) / span : 0.5;
    return px_lo + f * (px_hi - px_lo);
  }
};

void open_svg(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
}

}  // namespace

std::string posterior_color(double p) {
  p = std::clamp(p, 0.0, 1.0);
  const long red = std::lround(255.0 * p);
  const long blue = std::lround(255.0 * (1.0 - p));
  std::array<char, 8> buf{};
  std::snprintf(buf.data(), buf.size(), "#%02lx00%02lx", red, blue);
  return buf.data();
}

void write_equity_svg(std::ostream& out, const BacktestReport& report, const std::string& title) {
  open_svg(out, title);
  const EquityCurve& c = report.curve;
  if (c.combined.empty()) {
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no trades</text>\n</svg>\n";
    return;
  }
  double lo = 0.0;
  double hi = 0.0;
  for (const auto* line : {&c.buy, &c.sell, &c.combined}) {
    lo = std::min(lo, *std::min_element(line->begin(), line->end()));
    hi = std::max(hi, *std::max_element(line->begin(), line->end()));
  }
  const Scale x{0.0, static_cast<double>(c.combined.size() - 1), kMargin, kWidth - kMargin};
  const Scale y{lo, hi, kHeight - kMargin, kMargin};

  out << "<line x1=\"" << kMargin << "\" y1=\"" << num(y(0.0)) << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
      << num(y(0.0)) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  struct Series {
    const std::vector<double>* values;
    const char* color;
    const char* name;
  };
  const std::array<Series, 3> lines{{{&c.buy, "#2a9d8f", "Buy"}, {&c.sell, "#e9c46a", "Sell"},
                                     {&c.combined, "#264653", "Buy and Sell"}}};
  double legend_y = 44.0;
  for (const Series& s : lines) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.values->size(); ++i)
      out << num(x(static_cast<double>(i))) << ',' << num(y((*s.values)[i])) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << kMargin + 10 << "\" y=\"" << legend_y << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << s.color << "\">" << s.name << "</text>\n";
    legend_y += 16.0;
  }
  for (std::size_t idx : {report.drawdown.peak, report.drawdown.trough}) {
    out << "<circle cx=\"" << num(x(static_cast<double>(idx))) << "\" cy=\"" << num(y(c.combined[idx]))
        << "\" r=\"4\" fill=\"red\"/>\n";
  }
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">ROI " << num(report.roi)
      << "%  max drawdown " << num(report.drawdown.value) << "%</text>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 16 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << format_timestamp(c.timestamps.front()) << " .. " << format_timestamp(c.timestamps.back()) << "</text>\n";
  out << "</svg>\n";
}

void write_scatter_svg(std::ostream& out, std::span<const EmbeddingPoint> points, const std::string& title) {
  open_svg(out, title);
  if (points.empty()) {
    out << "</svg>\n";
    return;
  }
  double x_lo = points.front().y1, x_hi = x_lo, y_lo = points.front().y2, y_hi = y_lo;
  for (const EmbeddingPoint& p : points) {
    x_lo = std::min(x_lo, p.y1);
    x_hi = std::max(x_hi, p.y1);
    y_lo = std::min(y_lo, p.y2);
    y_hi = std::max(y_hi, p.y2);
  }
  const Scale x{x_lo, x_hi, kMargin, kWidth - kMargin};
  const Scale y{y_lo, y_hi, kHeight - kMargin, kMargin};
  for (const EmbeddingPoint& p : points) {
    out << "<circle cx=\"" << num(x(p.y1)) << "\" cy=\"" << num(y(p.y2)) << "\" r=\"2.5\" fill=\""
        << posterior_color(p.posterior) << "\" fill-opacity=\"0.8\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace fxga
