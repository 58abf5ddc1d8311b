#include "convser/metrics.hpp"

#include <string>

#include "convser/errors.hpp"

namespace convser {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw SizeError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(labels.size()) + " labels");
  if (predictions.empty()) throw SizeError("confusion: no samples");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = predictions[i] == 1;
    const bool actual = labels[i] == 1;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsReport metrics(const ConfusionCounts& c) {
  if (c.total() <= 0) throw ParameterError("metrics: no evaluated samples");
  MetricsReport m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.precision && m.sensitivity && *m.precision + *m.sensitivity > 0.0)
    m.f1 = 2.0 * *m.precision * *m.sensitivity / (*m.precision + *m.sensitivity);
  return m;
}

namespace {
nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json("n/a");
}
}  // namespace

void to_json(nlohmann::json& j, const ConfusionCounts& c) {
  j = nlohmann::json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

void to_json(nlohmann::json& j, const MetricsReport& m) {
  j = nlohmann::json{{"accuracy", m.accuracy},
                     {"precision", optional_json(m.precision)},
                     {"sensitivity", optional_json(m.sensitivity)},
                     {"f1", optional_json(m.f1)}};
}

}  // namespace convser
