// SPDX-License-Identifier: Apache-2.0
#include "aad/harness.hpp"

namespace aad {

EvalReport compute_metrics(std::span<const Verdict> predictions, std::span<const Label> golds,
                           Label positive_class) {
  if (predictions.empty() || predictions.size() != golds.size()) {
    throw InputError("metrics need equally sized, non-empty prediction and gold sequences (got " +
                     std::to_string(predictions.size()) + " and " + std::to_string(golds.size()) +
                     ")");
  }
  const Verdict positive = positive_class == Label::yes ? Verdict::yes : Verdict::no;

  ConfusionCounts c;
  std::size_t parsed_yes = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Verdict p = predictions[i];
    const bool gold_positive = golds[i] == positive_class;
    if (p == Verdict::yes) {
      ++parsed_yes;
    }
    if (p == Verdict::unparseable) {
      ++c.unparseable;
      if (gold_positive) {
        ++c.fn;
        ++c.unparseable_positive;
      }
    } else if (p == positive) {
      ++(gold_positive ? c.tp : c.fp);
    } else {
      ++(gold_positive ? c.fn : c.tn);
    }
  }

  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  const std::size_t n = predictions.size();
  EvalReport report;
  report.counts = c;
  report.accuracy = ratio(c.tp + c.tn, n);
  report.precision = ratio(c.tp, c.tp + c.fp);
  report.recall = ratio(c.tp, c.tp + c.fn);
  const double denom = report.precision + report.recall;
  report.f1 = denom > 0.0 ? 2.0 * report.precision * report.recall / denom : 0.0;
  report.yes_rate = ratio(parsed_yes, n);
  report.unparseable_rate = ratio(c.unparseable, n);
  return report;
}

}  // namespace aad
