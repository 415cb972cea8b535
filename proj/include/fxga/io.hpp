#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fxga/backtest.hpp"
#include "fxga/bayes.hpp"
#include "fxga/cv.hpp"
#include "fxga/ga.hpp"

namespace fxga {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Provenance stamped into every artifact.
struct ArtifactMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
};

Json to_json(const ArtifactMeta& meta);
/// `# seed=...` / `# config_hash=...` lines for CSV headers.
std::vector<std::string> header_lines(const ArtifactMeta& meta);

Json to_json(const IndicatorSpec& spec);
IndicatorSpec spec_from_json(const Json& j);

Json to_json(const Chromosome& c);
Chromosome chromosome_from_json(const Json& j);

Json to_json(const RejectionModel& model, std::span<const IndicatorSpec> features);
RejectionModel rejection_model_from_json(const Json& j);

Json to_json(const CvReport& report);
Json to_json(const MetricsTable& table);
Json to_json(const BacktestReport& report);

/// Two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// generation,max_fitness,mean_fitness,min_fitness,hyper_mutation,mutation_rate,replaced,features
void write_trace_csv(std::ostream& out, const GaTrace& trace, const std::vector<std::string>& header);

/// timestamp,decision,posterior where decision is buy, sell or reject.
void write_signals_csv(std::ostream& out, std::span<const Signal> signals, const std::vector<std::string>& header);
/// Reads the signal file back; candle indices are resolved against `series`.
std::vector<Signal> read_signals_csv(std::istream& in, const Series& series);

/// timestamp,buy,sell,combined in percentage points.
void write_equity_csv(std::ostream& out, const EquityCurve& curve, const std::vector<std::string>& header);

std::string to_string(Decision d);

/// Opens a file for binary writing, creating parent directories.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace fxga
