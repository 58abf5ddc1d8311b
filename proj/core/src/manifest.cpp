#include "convser/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "convser/errors.hpp"

namespace convser {

std::string_view to_string(Position p) { return p == Position::Pro ? "pro" : "contra"; }

std::string_view to_string(AugmentationKind k) {
  switch (k) {
    case AugmentationKind::Original: return "original";
    case AugmentationKind::TimeStretch: return "time_stretch";
    case AugmentationKind::PitchShift: return "pitch_shift";
    case AugmentationKind::Noise: return "noise";
    case AugmentationKind::Combined: return "combined";
  }
  return "original";
}

Position parse_position(std::string_view s) {
  if (s == "pro") return Position::Pro;
  if (s == "contra") return Position::Contra;
  throw ParameterError("unknown position '" + std::string(s) + "'");
}

AugmentationKind parse_augmentation(std::string_view s) {
  for (auto k : {AugmentationKind::Original, AugmentationKind::TimeStretch,
                 AugmentationKind::PitchShift, AugmentationKind::Noise,
                 AugmentationKind::Combined}) {
    if (to_string(k) == s) return k;
  }
  throw ParameterError("unknown augmentation '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const SampleRecord& r) {
  j = nlohmann::json{{"id", r.id},
                     {"path", r.path},
                     {"speaker_id", r.speaker_id},
                     {"topic_id", r.topic_id},
                     {"position", to_string(r.position)},
                     {"label", r.label},
                     {"group_id", r.group_id},
                     {"augmentation", to_string(r.augmentation)}};
}

void from_json(const nlohmann::json& j, SampleRecord& r) {
  r.id = j.at("id").get<std::string>();
  r.path = j.at("path").get<std::string>();
  r.speaker_id = j.at("speaker_id").get<std::string>();
  r.topic_id = j.at("topic_id").get<int>();
  r.position = parse_position(j.at("position").get<std::string>());
  r.label = j.at("label").get<int>();
  r.group_id = j.at("group_id").get<std::string>();
  r.augmentation = parse_augmentation(j.value("augmentation", std::string("original")));
}

std::size_t DatasetManifest::count_label(int label) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.label == label ? 1 : 0;
  return n;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());

  DatasetManifest manifest;
  manifest.root = path.parent_path();
  std::vector<std::string> problems;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    SampleRecord record;
    try {
      record = nlohmann::json::parse(line).get<SampleRecord>();
    } catch (const std::exception& e) {
      problems.push_back(where + e.what());
      continue;
    }
    if (record.id.empty()) problems.push_back(where + "empty id");
    if (!seen.insert(record.id).second) problems.push_back(where + "duplicate id '" + record.id + "'");
    if (record.label != 0 && record.label != 1)
      problems.push_back(where + "label " + std::to_string(record.label) + " outside {0,1}");
    if (record.topic_id < 1 || record.topic_id > 4)
      problems.push_back(where + "topic_id " + std::to_string(record.topic_id) + " outside 1..4");
    if (record.group_id.empty()) problems.push_back(where + "empty group_id");
    const auto wav = manifest.root / record.path;
    std::ifstream probe(wav, std::ios::binary);
    char magic[4] = {};
    if (!probe || !probe.read(magic, 4) || std::string_view(magic, 4) != "RIFF")
      problems.push_back(where + "'" + record.id + "' has no readable WAV at " + wav.string());
    manifest.records.push_back(std::move(record));
  }
  if (manifest.records.empty() && problems.empty()) problems.emplace_back("manifest has no records");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& r : manifest.records) {
    // ordered_json keeps the declared field order on disk.
    nlohmann::ordered_json line{{"id", r.id},
                                {"path", r.path},
                                {"speaker_id", r.speaker_id},
                                {"topic_id", r.topic_id},
                                {"position", to_string(r.position)},
                                {"label", r.label},
                                {"group_id", r.group_id},
                                {"augmentation", to_string(r.augmentation)}};
    out << line.dump() << '\n';
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot write manifest " + path.string());
  file << out.str();
  if (!file) throw IoError("write failed for " + path.string());
}

}  // namespace convser
