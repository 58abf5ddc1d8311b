#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "convser/errors.hpp"
#include "convser/training.hpp"

using namespace convser;

namespace {

const ModelConfig kTiny{2, 3, 3, 5, 4};

// Label 1 rows sit near +0.5, label 0 rows near -0.5.
Dataset toy(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  Dataset d;
  for (int i = 0; i < n; ++i) {
    Example e;
    e.id = "x" + std::to_string(i);
    e.group_id = e.id;
    e.label = i % 2;
    e.features.resize(kTiny.max_frames, kTiny.n_mfcc);
    for (Eigen::Index k = 0; k < e.features.size(); ++k)
      e.features(k) = (e.label ? 0.5 : -0.5) + jitter(rng);
    d.push_back(std::move(e));
  }
  return d;
}

Split all_train(std::size_t n) {
  Split s;
  for (std::size_t i = 0; i < n; ++i) (i < n - 4 ? s.train : s.validation).push_back(i);
  return s;
}

TrainConfig quick(int epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.learning_rate = 0.01;
  return c;
}

}  // namespace

TEST(Training, FitsSeparableToySet) {
  const Dataset d = toy(40, 1);
  const Split s = all_train(d.size());
  const TrainResult r = train_model(kTiny, quick(60), d, s, 3);
  ASSERT_EQ(r.history.size(), 61u);
  EXPECT_EQ(r.history.front().epoch, 0);
  EXPECT_EQ(r.selected_epoch, 60);
  const auto c = evaluate(kTiny, r.params, d, s.train);
  EXPECT_EQ(c.tp + c.tn, static_cast<long>(s.train.size()));
  EXPECT_LT(r.history.back().train_loss, r.history.front().train_loss);
}

TEST(Training, UntrainedLossNearLogTwo) {
  const Dataset d = toy(40, 2);
  const TrainResult r = train_model(kTiny, quick(1), d, all_train(d.size()), 4);
  EXPECT_NEAR(r.history.front().train_loss, std::log(2.0), 0.15);
}

TEST(Training, DeterministicAcrossRunsAndJobs) {
  const Dataset d = toy(24, 3);
  const Split s = all_train(d.size());
  const TrainResult a = train_model(kTiny, quick(3), d, s, 9, 1);
  const TrainResult b = train_model(kTiny, quick(3), d, s, 9, 1);
  const TrainResult c = train_model(kTiny, quick(3), d, s, 9, 3);
  for (const auto* other : {&b, &c}) {
    const auto x = a.params.tensors();
    const auto y = other->params.tensors();
    for (std::size_t t = 0; t < x.size(); ++t)
      for (std::size_t i = 0; i < x[t].size(); ++i) ASSERT_EQ(x[t][i], y[t][i]);
    for (std::size_t e = 0; e < a.history.size(); ++e) EXPECT_EQ(a.history[e].train_loss, other->history[e].train_loss);
  }
}

TEST(Training, BestValidationSelection) {
  const Dataset d = toy(24, 4);
  TrainConfig c = quick(5);
  c.model_selection = ModelSelection::BestValidation;
  const TrainResult r = train_model(kTiny, c, d, all_train(d.size()), 1);
  // Earliest epoch with the highest validation accuracy.
  int expected = 1;
  for (int e = 2; e < static_cast<int>(r.history.size()); ++e)
    if (r.history[e].val_accuracy > r.history[expected].val_accuracy) expected = e;
  EXPECT_EQ(r.selected_epoch, expected);
}

TEST(CrossValidate, AveragesAreMeansOfShuffles) {
  const Dataset d = toy(30, 5);
  TrainConfig c = quick(1);
  const RunReport r = cross_validate(kTiny, c, d);
  ASSERT_EQ(r.shuffles.size(), 3u);
  double acc = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(r.shuffles[k].seed, c.seed + k);
    EXPECT_EQ(r.shuffles[k].validation_ids.size(), 9u);
    acc += r.shuffles[k].validation_metrics.accuracy;
  }
  EXPECT_NEAR(r.averaged.accuracy, acc / 3.0, 1e-15);
  EXPECT_EQ(r.model_id, "C2x3x3-5");
  const auto j = run_report_json(r, false);
  EXPECT_EQ(j["model_id"], "C2x3x3-5");
}

TEST(CrossValidate, RejectsUnusableDatasets) {
  Dataset d = toy(10, 6);
  for (auto& e : d) e.label = 1;
  EXPECT_THROW(cross_validate(kTiny, quick(1), d), ConfigError);
  Dataset wide = toy(10, 7);
  wide[3].features.conservativeResize(Eigen::NoChange, 6);
  EXPECT_THROW(cross_validate(kTiny, quick(1), wide), ConfigError);
}

TEST(AverageMetrics, SkipsUndefinedValues) {
  std::vector<MetricsReport> runs(3);
  runs[0] = {0.5, 0.4, std::nullopt, std::nullopt};
  runs[1] = {0.7, 0.6, 0.8, 0.7};
  runs[2] = {0.9, std::nullopt, 1.0, std::nullopt};
  const auto a = average_metrics(runs);
  EXPECT_NEAR(a.accuracy, 0.7, 1e-15);
  EXPECT_NEAR(*a.precision, 0.5, 1e-15);
  EXPECT_NEAR(*a.sensitivity, 0.9, 1e-15);
  EXPECT_NEAR(*a.f1, 0.7, 1e-15);
  EXPECT_EQ(a.undefined_precision, 1);
  EXPECT_EQ(a.undefined_f1, 2);
}

// Paper-mode leakage: a validation item identical to a training item gets
// exactly the same score, whatever the model learned.
TEST(Leakage, ExactTwinsScoreIdentically) {
  Dataset d = toy(12, 8);
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    Example twin = d[i];
    twin.id += "_copy";
    d.push_back(twin);
  }
  Split s;
  for (std::size_t i = 0; i < n; ++i) {
    s.train.push_back(i);
    s.validation.push_back(n + i);
  }
  const TrainResult r = train_model(kTiny, quick(4), d, s, 2);
  const auto train_p = predict_probabilities(kTiny, r.params, d, s.train);
  const auto val_p = predict_probabilities(kTiny, r.params, d, s.validation);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(train_p[i], val_p[i]);
}

TEST(Grid, TableOrder) {
  const auto g = grid_configs(13, 10);
  ASSERT_EQ(g.size(), 8u);
  const int filters[] = {16, 32, 16, 32, 16, 32, 16, 32};
  const int kernels[] = {5, 5, 20, 20, 5, 5, 20, 20};
  const int units[] = {20, 20, 20, 20, 40, 40, 40, 40};
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(g[i].filters, filters[i]);
    EXPECT_EQ(g[i].kernel_size, kernels[i]);
    EXPECT_EQ(g[i].lstm_units, units[i]);
    EXPECT_EQ(g[i].n_mfcc, 13);
    EXPECT_EQ(model_id_for(g[i]), "M" + std::to_string(i + 1) + "-13");
  }
}

TEST(TrainConfigJson, RoundTripAndValidation) {
  TrainConfig c;
  c.split_mode = SplitMode::Grouped;
  c.model_selection = ModelSelection::BestValidation;
  EXPECT_EQ(nlohmann::json(c).get<TrainConfig>(), c);
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(predict_label(0.5), 1);
  EXPECT_EQ(predict_label(0.4999), 0);
}
