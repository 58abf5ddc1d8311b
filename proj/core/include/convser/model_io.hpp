#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "convser/neural_net.hpp"

namespace convser {

inline constexpr int kModelFormatVersion = 1;

struct SavedModel {
  ModelConfig config;
  ModelParams params;
  // Free-form provenance: feature config, seeds, config hashes.
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json model_to_json(const SavedModel& model);
SavedModel model_from_json(const nlohmann::json& j);

void save_model(const SavedModel& model, const std::filesystem::path& path);
// Throws FormatError on a wrong version, missing tensor or shape mismatch.
SavedModel load_model(const std::filesystem::path& path);

}  // namespace convser
