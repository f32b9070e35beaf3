#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace burrscan {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fn + fp + tn; }
  // Same outcomes with the positive class swapped.
  ConfusionCounts flipped() const noexcept { return {tn, fp, fn, tp}; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// A metric whose denominator is zero is absent rather than 0.
struct MetricSet {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

// accuracy = (tp + tn) / total, precision = tp / (tp + fp),
// recall = tp / (tp + fn), f1 = 2 / (1/precision + 1/recall).
MetricSet confusion_metrics(const ConfusionCounts& c) noexcept;

// Unwraps a metric, throwing UndefinedMetric when it is absent.
double require_metric(const std::optional<double>& value, std::string_view name);

}  // namespace burrscan
