#include "convser/feature_store.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "convser/errors.hpp"

namespace convser {

void to_json(nlohmann::json& j, const FeatureSidecar& s) {
  j = nlohmann::json{{"id", s.id},
                     {"feature_config_hash", s.feature_config_hash},
                     {"content_hash", s.content_hash},
                     {"pipeline_config_hash", s.pipeline_config_hash},
                     {"seed", s.seed},
                     {"n_valid_frames", s.n_valid_frames},
                     {"frames", s.frames},
                     {"width", s.width},
                     {"feature_mode", to_string(s.feature_mode)}};
}

void from_json(const nlohmann::json& j, FeatureSidecar& s) {
  s.id = j.at("id").get<std::string>();
  s.feature_config_hash = j.at("feature_config_hash").get<std::string>();
  s.content_hash = j.at("content_hash").get<std::string>();
  s.pipeline_config_hash = j.value("pipeline_config_hash", std::string());
  s.seed = j.value("seed", std::uint64_t{0});
  s.n_valid_frames = j.at("n_valid_frames").get<int>();
  s.frames = j.at("frames").get<int>();
  s.width = j.at("width").get<int>();
  s.feature_mode = parse_feature_mode(j.at("feature_mode").get<std::string>());
}

void write_feature_csv(const Eigen::MatrixXd& values, const std::filesystem::path& path) {
  std::string out;
  out.reserve(static_cast<std::size_t>(values.size()) * 24);
  char buf[32];
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out.push_back(',');
      const int n = std::snprintf(buf, sizeof buf, "%.17g", values(r, c));
      out.append(buf, static_cast<std::size_t>(n));
    }
    out.push_back('\n');
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file << out;
  if (!file) throw IoError("write failed for " + path.string());
}

Eigen::MatrixXd read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw FormatError(path.string() + ": bad number in row " + std::to_string(rows.size() + 1));
      row.push_back(v);
      p = next;
      if (p < end && *p == ',') ++p;
      else if (p < end && *p != '\r') throw FormatError(path.string() + ": bad separator");
      else break;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError(path.string() + ": ragged row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

FeatureStore::FeatureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path FeatureStore::csv_path(const std::string& id) const {
  return dir_ / (id + ".features.csv");
}

std::filesystem::path FeatureStore::sidecar_path(const std::string& id) const {
  return dir_ / (id + ".features.json");
}

bool FeatureStore::contains(const std::string& id) const {
  return std::filesystem::exists(csv_path(id)) && std::filesystem::exists(sidecar_path(id));
}

std::optional<FeatureSidecar> FeatureStore::sidecar(const std::string& id) const {
  std::ifstream in(sidecar_path(id));
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in).get<FeatureSidecar>();
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void FeatureStore::save(const FeatureSidecar& sidecar, const FeatureMatrix& features) const {
  std::filesystem::create_directories(dir_);
  write_feature_csv(features.values, csv_path(sidecar.id));
  std::ofstream out(sidecar_path(sidecar.id), std::ios::trunc);
  if (!out) throw IoError("cannot write " + sidecar_path(sidecar.id).string());
  out << nlohmann::json(sidecar).dump(2) << '\n';
}

FeatureMatrix FeatureStore::load(const std::string& id) const {
  const auto meta = sidecar(id);
  if (!meta) throw IoError("no feature sidecar for '" + id + "' in " + dir_.string());
  FeatureMatrix fm;
  fm.values = read_feature_csv(csv_path(id));
  fm.n_valid_frames = meta->n_valid_frames;
  if (fm.frames() != meta->frames || fm.width() != meta->width)
    throw FormatError("features for '" + id + "' do not match their sidecar shape");
  return fm;
}

}  // namespace convser
