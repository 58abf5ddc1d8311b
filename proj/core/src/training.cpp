#include "convser/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "convser/errors.hpp"
#include "convser/hashing.hpp"
#include "convser/parallel.hpp"

namespace convser {

std::string_view to_string(ModelSelection s) {
  return s == ModelSelection::FinalEpoch ? "final_epoch" : "best_val";
}

ModelSelection parse_model_selection(std::string_view s) {
  if (s == "final_epoch") return ModelSelection::FinalEpoch;
  if (s == "best_val") return ModelSelection::BestValidation;
  throw ParameterError("unknown model selection '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0))
    throw ConfigError("train config: split_ratio must lie in (0, 1)");
  if (n_shuffles < 1) throw ConfigError("train config: n_shuffles must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train config: learning_rate must be positive");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"batch_size", c.batch_size},
                     {"learning_rate", c.learning_rate},
                     {"adam_beta1", c.adam_beta1},
                     {"adam_beta2", c.adam_beta2},
                     {"adam_epsilon", c.adam_epsilon},
                     {"split_ratio", c.split_ratio},
                     {"n_shuffles", c.n_shuffles},
                     {"split_mode", to_string(c.split_mode)},
                     {"seed", c.seed},
                     {"model_selection", to_string(c.model_selection)}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.adam_beta1 = j.value("adam_beta1", d.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", d.adam_beta2);
  c.adam_epsilon = j.value("adam_epsilon", d.adam_epsilon);
  c.split_ratio = j.value("split_ratio", d.split_ratio);
  c.n_shuffles = j.value("n_shuffles", d.n_shuffles);
  c.split_mode = parse_split_mode(j.value("split_mode", std::string("paper")));
  c.seed = j.value("seed", d.seed);
  c.model_selection = parse_model_selection(j.value("model_selection", std::string("final_epoch")));
}

Dataset load_dataset(const DatasetManifest& manifest, const FeatureStore& store,
                     int expected_width) {
  Dataset data;
  data.reserve(manifest.size());
  for (const auto& r : manifest.records) {
    if (!store.contains(r.id))
      throw ConfigError("features for '" + r.id + "' not found in " + store.dir().string() +
                        "; run `convser extract` first");
    FeatureMatrix fm = store.load(r.id);
    if (fm.width() != expected_width)
      throw ConfigError("features for '" + r.id + "' are " + std::to_string(fm.width()) +
                        " wide, the model expects " + std::to_string(expected_width));
    data.push_back({r.id, r.group_id, r.label, std::move(fm.values)});
  }
  return data;
}

int predict_label(double probability) { return probability >= 0.5 ? 1 : 0; }

std::vector<double> predict_probabilities(const ModelConfig& config, const ModelParams& params,
                                          const Dataset& dataset,
                                          std::span<const std::size_t> indices, int jobs) {
  std::vector<double> out(indices.size());
  parallel_for(indices.size(), jobs, [&](std::size_t i) {
    out[i] = model_predict(config, dataset[indices[i]].features, params);
  });
  return out;
}

ConfusionCounts evaluate(const ModelConfig& config, const ModelParams& params,
                         const Dataset& dataset, std::span<const std::size_t> indices, int jobs) {
  const auto probs = predict_probabilities(config, params, dataset, indices, jobs);
  std::vector<int> preds(probs.size());
  std::vector<int> labels(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    preds[i] = predict_label(probs[i]);
    labels[i] = dataset[indices[i]].label;
  }
  return confusion(preds, labels);
}

namespace {

void check_shapes(const ModelConfig& mc, const Dataset& dataset) {
  for (const auto& ex : dataset) {
    if (ex.features.cols() != mc.n_mfcc || ex.features.rows() != mc.max_frames)
      throw ConfigError("example '" + ex.id + "' has " + std::to_string(ex.features.rows()) + " x " +
                        std::to_string(ex.features.cols()) + " features; model expects " +
                        std::to_string(mc.max_frames) + " x " + std::to_string(mc.n_mfcc));
    if (ex.label != 0 && ex.label != 1)
      throw ConfigError("example '" + ex.id + "' has label outside {0,1}");
  }
}

struct SetScore {
  double loss = 0.0;
  double accuracy = 0.0;
};

SetScore score_set(const ModelConfig& mc, const ModelParams& params, const Dataset& dataset,
                   std::span<const std::size_t> indices, int jobs) {
  if (indices.empty()) return {};
  std::vector<double> loss(indices.size());
  std::vector<int> correct(indices.size());
  parallel_for(indices.size(), jobs, [&](std::size_t i) {
    const auto& ex = dataset[indices[i]];
    const auto fwd = model_forward(mc, ex.features, params);
    loss[i] = bce_loss_from_logit(fwd.trace.logit, ex.label);
    correct[i] = predict_label(fwd.probability) == ex.label ? 1 : 0;
  });
  const double n = static_cast<double>(indices.size());
  return {std::accumulate(loss.begin(), loss.end(), 0.0) / n,
          std::accumulate(correct.begin(), correct.end(), 0.0) / n};
}

}  // namespace

TrainResult train_model(const ModelConfig& mc, const TrainConfig& tc, const Dataset& dataset,
                        const Split& split, std::uint64_t seed, int jobs) {
  mc.validate();
  tc.validate();
  check_shapes(mc, dataset);
  if (split.train.empty()) throw ConfigError("train_model: empty training split");

  TrainResult result;
  result.params = ModelParams::glorot(mc, derive_seed(seed, std::string_view("init")));
  const AdamConfig adam = tc.adam();
  AdamState state;

  {
    const auto tr = score_set(mc, result.params, dataset, split.train, jobs);
    const auto va = score_set(mc, result.params, dataset, split.validation, jobs);
    result.history.push_back({0, tr.loss, tr.accuracy, va.loss, va.accuracy});
  }

  ModelParams best = result.params;
  double best_val = -1.0;
  int best_epoch = 0;

  std::vector<std::size_t> order = split.train;
  const auto batch = static_cast<std::size_t>(tc.batch_size);
  std::vector<ModelParams> grads(std::min(batch, order.size()));
  std::vector<double> losses(grads.size());
  std::vector<int> correct(grads.size());

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    long correct_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t b = std::min(batch, order.size() - start);
      parallel_for(b, jobs, [&](std::size_t i) {
        const auto& ex = dataset[order[start + i]];
        const auto fwd = model_forward(mc, ex.features, result.params);
        losses[i] = bce_loss_from_logit(fwd.trace.logit, ex.label);
        correct[i] = predict_label(fwd.probability) == ex.label ? 1 : 0;
        grads[i] = model_backward(mc, fwd.trace, ex.label, result.params);
      });
      ModelParams total = grads[0];
      for (std::size_t i = 1; i < b; ++i) total += grads[i];
      total *= 1.0 / static_cast<double>(b);
      adam_step(result.params, total, state, adam);
      for (std::size_t i = 0; i < b; ++i) {
        loss_sum += losses[i];
        correct_sum += correct[i];
      }
    }
    const double n = static_cast<double>(order.size());
    const auto va = score_set(mc, result.params, dataset, split.validation, jobs);
    result.history.push_back({epoch, loss_sum / n, static_cast<double>(correct_sum) / n, va.loss,
                              va.accuracy});
    if (tc.model_selection == ModelSelection::BestValidation && va.accuracy > best_val) {
      best_val = va.accuracy;
      best = result.params;
      best_epoch = epoch;
    }
  }

  result.selected_epoch = tc.epochs;
  if (tc.model_selection == ModelSelection::BestValidation && best_epoch > 0) {
    result.params = std::move(best);
    result.selected_epoch = best_epoch;
  }
  return result;
}

AveragedMetrics average_metrics(std::span<const MetricsReport> runs) {
  AveragedMetrics avg;
  if (runs.empty()) return avg;
  double acc = 0.0;
  auto mean_of = [&](auto member, int& undefined) -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : runs) {
      const std::optional<double>& v = r.*member;
      if (v) {
        sum += *v;
        ++count;
      } else {
        ++undefined;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };
  for (const auto& r : runs) acc += r.accuracy;
  avg.accuracy = acc / static_cast<double>(runs.size());
  avg.precision = mean_of(&MetricsReport::precision, avg.undefined_precision);
  avg.sensitivity = mean_of(&MetricsReport::sensitivity, avg.undefined_sensitivity);
  avg.f1 = mean_of(&MetricsReport::f1, avg.undefined_f1);
  return avg;
}

std::vector<ModelConfig> grid_configs(int n_mfcc, int max_frames) {
  std::vector<ModelConfig> cells;
  for (int units : {20, 40})
    for (int kernel : {5, 20})
      for (int filters : {16, 32}) cells.push_back({filters, kernel, units, n_mfcc, max_frames});
  return cells;
}

std::string model_id_for(const ModelConfig& c) {
  if (c.is_grid_config()) {
    const int index = (c.filters == 32 ? 1 : 0) + (c.kernel_size == 20 ? 2 : 0) +
                      (c.lstm_units == 40 ? 4 : 0) + 1;
    return "M" + std::to_string(index) + "-" + std::to_string(c.n_mfcc);
  }
  return "C" + std::to_string(c.filters) + "x" + std::to_string(c.kernel_size) + "x" +
         std::to_string(c.lstm_units) + "-" + std::to_string(c.n_mfcc);
}

RunReport cross_validate(const ModelConfig& mc, const TrainConfig& tc, const Dataset& dataset,
                         int jobs) {
  tc.validate();
  if (dataset.size() < 2) throw ConfigError("cross_validate: need at least two examples");
  bool has0 = false, has1 = false;
  for (const auto& ex : dataset) (ex.label == 1 ? has1 : has0) = true;
  if (!has0 || !has1) throw ConfigError("cross_validate: training needs both labels present");

  RunReport report;
  report.model_id = model_id_for(mc);
  report.model_config = mc;
  report.train_config = tc;

  std::vector<std::string> groups;
  groups.reserve(dataset.size());
  for (const auto& ex : dataset) groups.push_back(ex.group_id);

  std::vector<MetricsReport> val_metrics, train_metrics;
  for (int s = 0; s < tc.n_shuffles; ++s) {
    ShuffleResult sr;
    sr.seed = tc.seed + static_cast<std::uint64_t>(s);
    const Split split = split_indices(groups, tc.split_ratio, tc.split_mode, sr.seed);
    TrainResult trained = train_model(mc, tc, dataset, split, sr.seed, jobs);
    for (auto i : split.train) sr.train_ids.push_back(dataset[i].id);
    for (auto i : split.validation) sr.validation_ids.push_back(dataset[i].id);
    sr.train_counts = evaluate(mc, trained.params, dataset, split.train, jobs);
    sr.validation_counts = evaluate(mc, trained.params, dataset, split.validation, jobs);
    sr.train_metrics = metrics(sr.train_counts);
    sr.validation_metrics = metrics(sr.validation_counts);
    sr.history = std::move(trained.history);
    sr.selected_epoch = trained.selected_epoch;
    sr.params = std::move(trained.params);
    val_metrics.push_back(sr.validation_metrics);
    train_metrics.push_back(sr.train_metrics);
    report.shuffles.push_back(std::move(sr));
  }
  report.averaged = average_metrics(val_metrics);
  report.averaged_train = average_metrics(train_metrics);
  return report;
}

std::size_t GridResult::trained_models() const {
  std::size_t n = 0;
  for (const auto* list : {&reports13, &reports40})
    for (const auto& r : *list) n += r.shuffles.size();
  return n;
}

GridResult run_grid(const TrainConfig& tc, const Dataset& dataset13, const Dataset& dataset40,
                    int jobs, const GridProgress& progress) {
  GridResult grid;
  auto run_width = [&](const Dataset& data, int width, std::vector<RunReport>& out) {
    const int frames = data.empty() ? 1 : static_cast<int>(data.front().features.rows());
    for (const auto& mc : grid_configs(width, frames)) {
      RunReport report;
      try {
        report = cross_validate(mc, tc, data, jobs);
      } catch (const std::exception& e) {
        report = RunReport{};
        report.model_id = model_id_for(mc);
        report.model_config = mc;
        report.train_config = tc;
        report.failed = true;
        report.error = e.what();
      }
      if (progress) progress(report);
      out.push_back(std::move(report));
    }
  };
  run_width(dataset13, 13, grid.reports13);
  run_width(dataset40, 40, grid.reports40);
  return grid;
}

namespace {
nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json("n/a");
}

nlohmann::json averaged_json(const AveragedMetrics& a) {
  return {{"accuracy", a.accuracy},
          {"precision", optional_json(a.precision)},
          {"sensitivity", optional_json(a.sensitivity)},
          {"f1", optional_json(a.f1)},
          {"undefined_runs",
           {{"precision", a.undefined_precision},
            {"sensitivity", a.undefined_sensitivity},
            {"f1", a.undefined_f1}}}};
}
}  // namespace

nlohmann::json run_report_json(const RunReport& report, bool include_history) {
  nlohmann::json shuffles = nlohmann::json::array();
  for (const auto& s : report.shuffles) {
    nlohmann::json js{{"seed", s.seed},
                      {"n_train", s.train_ids.size()},
                      {"n_validation", s.validation_ids.size()},
                      {"train_counts", s.train_counts},
                      {"validation_counts", s.validation_counts},
                      {"train_metrics", s.train_metrics},
                      {"validation_metrics", s.validation_metrics},
                      {"selected_epoch", s.selected_epoch}};
    if (include_history) {
      nlohmann::json hist = nlohmann::json::array();
      for (const auto& e : s.history)
        hist.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"train_accuracy", e.train_accuracy},
                        {"val_loss", e.val_loss},
                        {"val_accuracy", e.val_accuracy}});
      js["history"] = std::move(hist);
    }
    shuffles.push_back(std::move(js));
  }
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : report.shuffles) seeds.push_back(s.seed);
  nlohmann::json j{{"model_id", report.model_id},
                   {"model_config", report.model_config},
                   {"train_config", report.train_config},
                   {"seeds", seeds},
                   {"shuffles", std::move(shuffles)},
                   {"averaged_validation", averaged_json(report.averaged)},
                   {"averaged_train", averaged_json(report.averaged_train)},
                   {"note", "averages skip n/a values; undefined_runs counts how many were skipped"}};
  if (report.failed) {
    j["failed"] = true;
    j["error"] = report.error;
  }
  return j;
}

}  // namespace convser
