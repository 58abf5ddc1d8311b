#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "convser/augmentation.hpp"
#include "convser/dsp_features.hpp"
#include "convser/neural_net.hpp"
#include "convser/synth_data.hpp"
#include "convser/training.hpp"

namespace convser::cli {

struct PipelinePaths {
  std::filesystem::path corpus = "corpus";
  std::filesystem::path augmented = "augmented";
  std::filesystem::path features = "features";
  std::filesystem::path models = "models";
  std::filesystem::path reports = "reports";

  bool operator==(const PipelinePaths&) const = default;
};

// Everything a pipeline run depends on. The seed is copied into the synth,
// augmentation and training sections by apply_seed().
struct PipelineConfig {
  std::uint64_t seed = 42;
  SynthSpec synth;
  FeatureConfig features13 = FeatureConfig::mfcc13();
  FeatureConfig features40 = FeatureConfig::mfcc40();
  AugmentationPlan augmentation = AugmentationPlan::standard();
  ModelConfig model;
  bool grid = false;
  TrainConfig train;
  PipelinePaths paths;

  void apply_seed(std::uint64_t value);
  // The feature config used for a given MFCC width (13 or 40).
  const FeatureConfig& features_for(int n_mfcc) const;
  void validate() const;

  bool operator==(const PipelineConfig&) const = default;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);

// Missing keys keep their defaults. Throws ConfigError on an invalid result.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// FNV-1a of the compact JSON dump, hex encoded.
std::string pipeline_config_hash(const PipelineConfig& c);

}  // namespace convser::cli
