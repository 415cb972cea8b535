#include "fxga/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>

#include "fxga/error.hpp"

namespace fxga {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_unsigned(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    fail(ErrorCode::InvalidConfig, std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  if (!parse_double(v, out) || !std::isfinite(out))
    fail(ErrorCode::InvalidConfig, std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

struct Setting {
  const char* key;
  bool hashed;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

template <class T>
Setting count(const char* key, T RunConfig::*member) {
  return {key, true, [member](const RunConfig& c) { return std::to_string(c.*member); },
          [key, member](RunConfig& c, std::string_view v) { c.*member = parse_unsigned<T>(key, v); }};
}

template <class Sub, class T>
Setting sub_count(const char* key, Sub RunConfig::*sub, T Sub::*member) {
  return {key, true, [sub, member](const RunConfig& c) { return std::to_string(c.*sub.*member); },
          [key, sub, member](RunConfig& c, std::string_view v) { c.*sub.*member = parse_unsigned<T>(key, v); }};
}

template <class Sub>
Setting sub_real(const char* key, Sub RunConfig::*sub, double Sub::*member) {
  return {key, true, [sub, member](const RunConfig& c) { return format_double(c.*sub.*member); },
          [key, sub, member](RunConfig& c, std::string_view v) { c.*sub.*member = parse_real(key, v); }};
}

Setting real(const char* key, double RunConfig::*member) {
  return {key, true, [member](const RunConfig& c) { return format_double(c.*member); },
          [key, member](RunConfig& c, std::string_view v) { c.*member = parse_real(key, v); }};
}

Setting path(const char* key, bool hashed, std::filesystem::path RunConfig::*member) {
  return {key, hashed, [member](const RunConfig& c) { return (c.*member).generic_string(); },
          [member](RunConfig& c, std::string_view v) { c.*member = std::filesystem::path(std::string(v)); }};
}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      path("data", true, &RunConfig::data),
      {"seed", true, [](const RunConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string(); },
       [](RunConfig& c, std::string_view v) {
         if (v.empty()) {
           c.seed.reset();
         } else {
           c.seed = parse_unsigned<std::uint64_t>("seed", v);
         }
       }},
      sub_real("split.train_fraction", &RunConfig::split, &SplitSpec::train_fraction),
      count("cv.k", &RunConfig::cv_k),
      real("rejection.acceptance", &RunConfig::acceptance),
      real("backtest.cost_per_trade", &RunConfig::cost_per_trade),
      sub_count("ga.population", &RunConfig::ga, &GaConfig::population_size),
      sub_count("ga.generations", &RunConfig::ga, &GaConfig::generations),
      sub_real("ga.crossover_rate", &RunConfig::ga, &GaConfig::crossover_rate),
      sub_real("ga.mutation_rate", &RunConfig::ga, &GaConfig::mutation_rate),
      sub_real("ga.hyper_mutation_rate", &RunConfig::ga, &GaConfig::hyper_mutation_rate),
      sub_real("ga.replacement_rate", &RunConfig::ga, &GaConfig::replacement_rate),
      sub_count("ga.stagnation_window", &RunConfig::ga, &GaConfig::stagnation_window),
      sub_count("ga.slots", &RunConfig::ga, &GaConfig::slots),
      sub_real("tsne.perplexity", &RunConfig::tsne, &EmbeddingConfig::perplexity),
      sub_count("tsne.iterations", &RunConfig::tsne, &EmbeddingConfig::iterations),
      sub_real("tsne.learning_rate", &RunConfig::tsne, &EmbeddingConfig::learning_rate),
      sub_real("tsne.early_exaggeration", &RunConfig::tsne, &EmbeddingConfig::early_exaggeration),
      sub_count("tsne.exaggeration_iterations", &RunConfig::tsne, &EmbeddingConfig::exaggeration_iterations),
      sub_count("tsne.max_points", &RunConfig::tsne, &EmbeddingConfig::max_points),
      path("out", false, &RunConfig::out),
      path("embed.chromosome", false, &RunConfig::chromosome),
      {"threads", false, [](const RunConfig& c) { return std::to_string(c.threads); },
       [](RunConfig& c, std::string_view v) { c.threads = parse_unsigned<unsigned>("threads", v); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& s : settings()) out.emplace_back(s.key);
  return out;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  for (const auto& s : settings()) {
    if (key == s.key) {
      s.set(*this, trim(value));
      return;
    }
  }
  fail(ErrorCode::InvalidConfig, "unknown setting '" + std::string(key) + "'");
}

void RunConfig::validate() const {
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
    fail(ErrorCode::InvalidConfig, "split.train_fraction must lie in (0, 1)");
  if (cv_k < 2) fail(ErrorCode::InvalidConfig, "cv.k must be >= 2");
  if (!(acceptance > 0.0 && acceptance < 1.0)) fail(ErrorCode::InvalidConfig, "rejection.acceptance must lie in (0, 1)");
  if (!(cost_per_trade >= 0.0 && cost_per_trade < 1.0))
    fail(ErrorCode::InvalidConfig, "backtest.cost_per_trade must lie in [0, 1)");
  ga.validate();
  if (tsne.iterations < 250) fail(ErrorCode::InvalidConfig, "tsne.iterations must be >= 250");
  if (!(tsne.perplexity > 1.0)) fail(ErrorCode::InvalidConfig, "tsne.perplexity must be > 1");
  if (!(tsne.learning_rate > 0.0)) fail(ErrorCode::InvalidConfig, "tsne.learning_rate must be > 0");
  if (tsne.max_points < 4) fail(ErrorCode::InvalidConfig, "tsne.max_points must be >= 4");
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) fail(ErrorCode::InvalidConfig, "a seed is required (--seed or 'seed = ...')");
  return *seed;
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& s : settings()) out += std::string(s.key) + " = " + s.get(*this) + "\n";
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  std::string text;
  for (const auto& s : settings())
    if (s.hashed) text += std::string(s.key) + "=" + s.get(*this) + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidConfig, "expected 'key = value'", line_no);
    try {
      base.set(trim(v.substr(0, eq)), trim(v.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no);
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidConfig, "cannot read config " + path.string());
  return parse_config(in, std::move(base));
}

}  // namespace fxga
