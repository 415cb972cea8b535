#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace fxga {

struct BacktestReport;
struct EmbeddingPoint;

/// Blue (p = 0) to red (p = 1) as `#rrggbb`.
std::string posterior_color(double p);

/// Buy / sell / combined equity lines with the drawdown peak and trough marked.
void write_equity_svg(std::ostream& out, const BacktestReport& report, const std::string& title);

/// Scatter of embedded points filled by posterior_color().
void write_scatter_svg(std::ostream& out, std::span<const EmbeddingPoint> points, const std::string& title);

}  // namespace fxga
