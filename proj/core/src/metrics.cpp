#include "burrscan/metrics.hpp"

#include <string>

#include "burrscan/errors.hpp"

namespace burrscan {

MetricSet confusion_metrics(const ConfusionCounts& c) noexcept {
  MetricSet m;
  const auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall) {
    if (*m.precision == 0.0 || *m.recall == 0.0) {
      m.f1 = 0.0;
    } else {
      m.f1 = 2.0 / (1.0 / *m.precision + 1.0 / *m.recall);
    }
  }
  return m;
}

double require_metric(const std::optional<double>& value, std::string_view name) {
  if (!value) throw UndefinedMetric(std::string(name) + " is undefined (zero denominator)");
  return *value;
}

}  // namespace burrscan
