#include <gtest/gtest.h>

#include <fstream>

#include "convser/errors.hpp"
#include "convser/model_io.hpp"
#include "test_support.hpp"

using namespace convser;

namespace {

SavedModel sample() {
  SavedModel m;
  m.config = ModelConfig{2, 3, 4, 5, 6};
  m.params = ModelParams::glorot(m.config, 11);
  m.params.conv_b(0) = 0.1;
  m.params.dense_b(0) = -1.0 / 3.0;
  m.metadata = {{"model_id", "C2x3x4-5"}, {"seed", 42}};
  return m;
}

}  // namespace

TEST(ModelIo, RoundTripIsBitExact) {
  testing_support::TempDir dir;
  const SavedModel m = sample();
  save_model(m, dir / "m.json");
  const SavedModel back = load_model(dir / "m.json");
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.metadata, m.metadata);
  const auto a = m.params.tensors();
  const auto b = back.params.tensors();
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t i = 0; i < a[t].size(); ++i) ASSERT_EQ(a[t][i], b[t][i]);
}

TEST(ModelIo, PredictionsSurviveRoundTrip) {
  const SavedModel m = sample();
  const SavedModel back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd x = testing_support::uniform_matrix(6, 5, rng);
  EXPECT_EQ(model_predict(m.config, x, m.params), model_predict(back.config, x, back.params));
}

TEST(ModelIo, RejectsDamagedFiles) {
  const nlohmann::json good = model_to_json(sample());
  auto j = good;
  j["version"] = 99;
  EXPECT_THROW(model_from_json(j), FormatError);
  j = good;
  j["format"] = "other";
  EXPECT_THROW(model_from_json(j), FormatError);
  j = good;
  j["gate_order"] = {"input", "cell", "forget", "output"};
  EXPECT_THROW(model_from_json(j), FormatError);
  j = good;
  j["tensors"].erase("lstm_recurrent_weights");
  EXPECT_THROW(model_from_json(j), FormatError);
  j = good;
  j["tensors"]["conv_kernel"]["shape"] = {4, 2};
  EXPECT_THROW(model_from_json(j), FormatError);
  j = good;
  j["tensors"]["dense_weights"]["data"].erase(0);
  EXPECT_THROW(model_from_json(j), FormatError);
}

TEST(ModelIo, FileErrors) {
  testing_support::TempDir dir;
  EXPECT_THROW(load_model(dir / "missing.json"), IoError);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_model(dir / "bad.json"), FormatError);
}
