#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace convser {

enum class Position { Pro, Contra };
enum class AugmentationKind { Original, TimeStretch, PitchShift, Noise, Combined };

std::string_view to_string(Position p);
std::string_view to_string(AugmentationKind k);
Position parse_position(std::string_view s);
AugmentationKind parse_augmentation(std::string_view s);

// One labeled recording. label 1 means the argued position matches the
// speaker's own conviction. Augmented variants keep the group_id and label of
// the recording they were derived from.
struct SampleRecord {
  std::string id;
  std::string path;  // relative to the manifest root
  std::string speaker_id;
  int topic_id = 1;
  Position position = Position::Pro;
  int label = 0;
  std::string group_id;
  AugmentationKind augmentation = AugmentationKind::Original;

  bool operator==(const SampleRecord&) const = default;
};

void to_json(nlohmann::json& j, const SampleRecord& r);
void from_json(const nlohmann::json& j, SampleRecord& r);

struct DatasetManifest {
  std::vector<SampleRecord> records;
  std::filesystem::path root;

  std::filesystem::path resolve(const SampleRecord& r) const { return root / r.path; }
  std::size_t size() const noexcept { return records.size(); }
  std::size_t count_label(int label) const;
};

// Parses a JSON-lines manifest; root becomes the manifest's directory.
// All-or-nothing: any problem (bad JSON, missing field, duplicate id, label
// outside {0,1}, topic outside 1..4, unreadable WAV) is collected with its
// line number and thrown together as a ValidationError.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Writes one record per line. The root is not stored; paths stay relative.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace convser
