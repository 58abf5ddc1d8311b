#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "convser/adam.hpp"
#include "convser/feature_store.hpp"
#include "convser/manifest.hpp"
#include "convser/metrics.hpp"
#include "convser/neural_net.hpp"
#include "convser/split.hpp"

namespace convser {

enum class ModelSelection { FinalEpoch, BestValidation };

std::string_view to_string(ModelSelection s);
ModelSelection parse_model_selection(std::string_view s);

struct TrainConfig {
  int epochs = 250;
  int batch_size = 16;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double split_ratio = 0.7;
  int n_shuffles = 3;
  SplitMode split_mode = SplitMode::Paper;
  std::uint64_t seed = 42;
  ModelSelection model_selection = ModelSelection::FinalEpoch;

  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_epsilon}; }
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct Example {
  std::string id;
  std::string group_id;
  int label = 0;
  Eigen::MatrixXd features;  // max_frames x n_mfcc
};

using Dataset = std::vector<Example>;

// Joins manifest records with their stored features. Throws ConfigError
// naming the first record whose features are missing or have the wrong width.
Dataset load_dataset(const DatasetManifest& manifest, const FeatureStore& store,
                     int expected_width);

// Epoch 0 is the untrained model evaluated on the training set; epochs
// 1..E report the mean loss and accuracy of the mini-batches seen during
// that epoch and the validation metrics after it.
struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> history;
  int selected_epoch = 0;
};

// Mini-batch Adam on dataset[split.train], monitored on
// dataset[split.validation]. Per-sample gradients inside a batch may be
// computed on `jobs` threads; they are summed in sample order so the result
// does not depend on jobs. Throws ConfigError on a feature/model shape
// mismatch.
TrainResult train_model(const ModelConfig& model_config, const TrainConfig& train_config,
                        const Dataset& dataset, const Split& split, std::uint64_t seed,
                        int jobs = 1);

std::vector<double> predict_probabilities(const ModelConfig& config, const ModelParams& params,
                                          const Dataset& dataset,
                                          std::span<const std::size_t> indices, int jobs = 1);
// Threshold 0.5.
int predict_label(double probability);

ConfusionCounts evaluate(const ModelConfig& config, const ModelParams& params,
                         const Dataset& dataset, std::span<const std::size_t> indices,
                         int jobs = 1);

struct ShuffleResult {
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  ConfusionCounts train_counts;
  ConfusionCounts validation_counts;
  MetricsReport train_metrics;
  MetricsReport validation_metrics;
  std::vector<EpochRecord> history;
  int selected_epoch = 0;
  ModelParams params;
};

// Averages skip undefined values; undefined_count says how many were skipped
// for precision, sensitivity and f1 (accuracy is always defined).
struct AveragedMetrics {
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> f1;
  int undefined_precision = 0;
  int undefined_sensitivity = 0;
  int undefined_f1 = 0;
};

AveragedMetrics average_metrics(std::span<const MetricsReport> runs);

struct RunReport {
  std::string model_id;
  ModelConfig model_config;
  TrainConfig train_config;
  std::vector<ShuffleResult> shuffles;
  AveragedMetrics averaged;
  AveragedMetrics averaged_train;
  bool failed = false;
  std::string error;
};

// "M<k>-<n_mfcc>" for grid configurations, otherwise
// "C<filters>x<kernel>x<units>-<n_mfcc>".
std::string model_id_for(const ModelConfig& config);

// n_shuffles independent splits with seeds seed+0, seed+1, ...; one training
// run per split; metrics averaged arithmetically.
RunReport cross_validate(const ModelConfig& model_config, const TrainConfig& train_config,
                         const Dataset& dataset, int jobs = 1);

// The eight grid cells in table order: filters vary fastest, then kernel,
// then LSTM units (M1 = 16/5/20, M8 = 32/20/40).
std::vector<ModelConfig> grid_configs(int n_mfcc, int max_frames);

struct GridResult {
  std::vector<RunReport> reports13;
  std::vector<RunReport> reports40;
  std::size_t trained_models() const;
};

using GridProgress = std::function<void(const RunReport&)>;

// Cross-validates all 16 cells; a cell that throws is recorded as failed.
GridResult run_grid(const TrainConfig& train_config, const Dataset& dataset13,
                    const Dataset& dataset40, int jobs = 1, const GridProgress& progress = {});

nlohmann::json run_report_json(const RunReport& report, bool include_history = true);

}  // namespace convser
