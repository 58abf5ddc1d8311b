#pragma once

#include <optional>
#include <span>

#include <nlohmann/json.hpp>

namespace convser {

// Positive class is label 1.
struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const noexcept { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept;
  bool operator==(const ConfusionCounts&) const = default;
};

// Precision is empty when tp+fp = 0, sensitivity when tp+fn = 0, and f1 when
// either of them is empty or both are zero.
struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> f1;
};

// Throws SizeError on a length mismatch or empty input.
ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels);

// Throws ParameterError when counts.total() == 0.
MetricsReport metrics(const ConfusionCounts& counts);

void to_json(nlohmann::json& j, const ConfusionCounts& c);
void to_json(nlohmann::json& j, const MetricsReport& m);

}  // namespace convser
