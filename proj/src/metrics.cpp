#include "fxga/metrics.hpp"

#include "fxga/error.hpp"

namespace fxga {

ConfusionSummary summarize(std::span<const Decision> decisions, std::span<const int> labels) {
  if (decisions.size() != labels.size()) fail(ErrorCode::LengthMismatch, "decisions and labels differ in length");
  ConfusionSummary s;
  s.total = decisions.size();
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const auto truth = static_cast<std::size_t>(labels[i]);
    ++s.per_class[truth].actual;
    if (decisions[i] == Decision::Rejected) continue;
    const auto predicted = static_cast<std::size_t>(decisions[i]);
    ++s.accepted;
    ++s.per_class[predicted].predicted;
    if (predicted == truth) ++s.per_class[predicted].correct;
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  for (auto& c : s.per_class) {
    c.precision = ratio(c.correct, c.predicted);
    c.recall = ratio(c.correct, c.actual);
  }
  s.acceptance_rate = ratio(s.accepted, s.total);
  s.accuracy = ratio(s.per_class[0].correct + s.per_class[1].correct, s.accepted);
  return s;
}

}  // namespace fxga
