#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fxga/backtest.hpp"
#include "fxga/ga.hpp"
#include "fxga/timeseries.hpp"
#include "fxga/tsne.hpp"

namespace fxga {

struct RunConfig {
  std::filesystem::path data;
  SplitSpec split;
  std::size_t cv_k = 7;
  double acceptance = 0.5;
  double cost_per_trade = 0.0;
  GaConfig ga;
  EmbeddingConfig tsne;
  std::filesystem::path out = "out";
  std::filesystem::path chromosome;  // embed input; defaults to <out>/optimize/chromosome.json
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  /// Applies one `key = value` setting.
  void set(std::string_view key, std::string_view value);
  /// Range checks; throws InvalidConfig.
  void validate() const;
  /// Throws InvalidConfig when no seed was given.
  std::uint64_t require_seed() const;

  /// Every key with its current value, one `key = value` per line.
  std::string canonical_text() const;
  /// FNV-1a 64 of the settings that influence results (excludes out, threads,
  /// chromosome path), as 16 hex digits.
  std::string hash() const;
};

std::vector<std::string> config_keys();

/// Parses `key = value` lines; `#` starts a comment.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

std::uint64_t fnv1a64(std::string_view text);

}  // namespace fxga
