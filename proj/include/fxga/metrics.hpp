#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "fxga/bayes.hpp"

namespace fxga {

struct ClassMetrics {
  std::size_t predicted = 0;  // accepted decisions for this class
  std::size_t correct = 0;
  std::size_t actual = 0;     // rows whose true label is this class
  double precision = 0.0;     // correct / predicted
  double recall = 0.0;        // correct / actual, rejected rows count as misses
};

struct ConfusionSummary {
  std::array<ClassMetrics, 2> per_class{};
  std::size_t accepted = 0;
  std::size_t total = 0;
  double acceptance_rate = 0.0;
  double accuracy = 0.0;  // over accepted rows only
};

ConfusionSummary summarize(std::span<const Decision> decisions, std::span<const int> labels);

}  // namespace fxga
