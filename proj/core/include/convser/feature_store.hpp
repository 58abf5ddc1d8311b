#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "convser/dsp_features.hpp"

namespace convser {

// Sidecar written next to every <id>.features.csv.
struct FeatureSidecar {
  std::string id;
  std::string feature_config_hash;
  std::string content_hash;  // of the source WAV
  std::string pipeline_config_hash;
  std::uint64_t seed = 0;
  int n_valid_frames = 0;
  int frames = 0;
  int width = 0;
  FeatureMode feature_mode = FeatureMode::Static40;
};

void to_json(nlohmann::json& j, const FeatureSidecar& s);
void from_json(const nlohmann::json& j, FeatureSidecar& s);

// CSV: one row per frame, one column per coefficient, no header, values
// printed with 17 significant digits so reading back is exact.
void write_feature_csv(const Eigen::MatrixXd& values, const std::filesystem::path& path);
Eigen::MatrixXd read_feature_csv(const std::filesystem::path& path);

// Directory layout: <dir>/<id>.features.csv + <dir>/<id>.features.json
class FeatureStore {
 public:
  explicit FeatureStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path csv_path(const std::string& id) const;
  std::filesystem::path sidecar_path(const std::string& id) const;

  bool contains(const std::string& id) const;
  std::optional<FeatureSidecar> sidecar(const std::string& id) const;

  void save(const FeatureSidecar& sidecar, const FeatureMatrix& features) const;
  FeatureMatrix load(const std::string& id) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace convser
