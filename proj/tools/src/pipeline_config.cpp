#include "convser/cli/pipeline_config.hpp"

#include <fstream>

#include "convser/errors.hpp"
#include "convser/hashing.hpp"

namespace convser::cli {

void PipelineConfig::apply_seed(std::uint64_t value) {
  seed = value;
  synth.seed = value;
  augmentation.seed = value;
  train.seed = value;
}

const FeatureConfig& PipelineConfig::features_for(int n_mfcc) const {
  if (n_mfcc == 13) return features13;
  if (n_mfcc == 40) return features40;
  throw ConfigError("no feature config for " + std::to_string(n_mfcc) + " MFCCs (use 13 or 40)");
}

void PipelineConfig::validate() const {
  synth.validate();
  features13.validate();
  features40.validate();
  model.validate();
  train.validate();
  if (feature_width(features13.feature_mode) != 13)
    throw ConfigError("features13 must produce 13 columns");
  if (feature_width(features40.feature_mode) != 40)
    throw ConfigError("features40 must produce 40 columns");
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{{"seed", c.seed},
                     {"synth", c.synth},
                     {"features13", c.features13},
                     {"features40", c.features40},
                     {"augmentation", c.augmentation},
                     {"model", c.model},
                     {"grid", c.grid},
                     {"train", c.train},
                     {"paths",
                      {{"corpus", c.paths.corpus.generic_string()},
                       {"augmented", c.paths.augmented.generic_string()},
                       {"features", c.paths.features.generic_string()},
                       {"models", c.paths.models.generic_string()},
                       {"reports", c.paths.reports.generic_string()}}}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  // Missing keys fall back to the defaults of the section they belong to.
  nlohmann::json merged = PipelineConfig{};
  merged.merge_patch(j);
  PipelineConfig out;
  out.synth = merged.at("synth").get<SynthSpec>();
  out.features13 = merged.at("features13").get<FeatureConfig>();
  out.features40 = merged.at("features40").get<FeatureConfig>();
  out.augmentation = merged.at("augmentation").get<AugmentationPlan>();
  out.model = merged.at("model").get<ModelConfig>();
  out.grid = merged.at("grid").get<bool>();
  out.train = merged.at("train").get<TrainConfig>();
  const auto& p = merged.at("paths");
  out.paths.corpus = p.at("corpus").get<std::string>();
  out.paths.augmented = p.at("augmented").get<std::string>();
  out.paths.features = p.at("features").get<std::string>();
  out.paths.models = p.at("models").get<std::string>();
  out.paths.reports = p.at("reports").get<std::string>();
  out.apply_seed(merged.at("seed").get<std::uint64_t>());
  c = std::move(out);
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  PipelineConfig config;
  try {
    config = nlohmann::json::parse(in).get<PipelineConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  config.validate();
  return config;
}

std::string pipeline_config_hash(const PipelineConfig& c) {
  return to_hex(fnv1a64(nlohmann::json(c).dump()));
}

}  // namespace convser::cli
