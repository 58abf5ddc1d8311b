#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convser/audio_io.hpp"
#include "convser/manifest.hpp"

namespace convser {

// Passing this as snr_db to add_noise returns the input unchanged.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

// Overlap-add time-scale modification. Output length is round(len / rate);
// rate 1.0 returns an exact copy. Throws ParameterError outside [0.5, 2].
AudioBuffer time_stretch(const AudioBuffer& buffer, double rate);

// Stretch by 2^(semitones/12), then resample back to the input length.
// Throws ParameterError when |semitones| > 12.
AudioBuffer pitch_shift(const AudioBuffer& buffer, double semitones);

// Adds white Gaussian noise rescaled so the realized SNR equals snr_db.
// Throws ParameterError for a zero-power signal.
AudioBuffer add_noise(const AudioBuffer& buffer, double snr_db, std::uint64_t seed);

struct AugmentationVariant {
  std::string tag;
  AugmentationKind kind = AugmentationKind::TimeStretch;
  double stretch_rate = 1.0;
  double semitones = 0.0;
  double snr_db = kNoNoise;

  bool operator==(const AugmentationVariant&) const = default;
};

struct AugmentationPlan {
  std::vector<AugmentationVariant> variants;
  std::uint64_t seed = 42;

  // Original + 7 variants: stretch 0.9/1.1, pitch -2/+2, noise 20/10 dB and
  // stretch 1.05 combined with 15 dB noise.
  static AugmentationPlan standard(std::uint64_t seed = 42);

  // Records produced per original, the original included.
  std::size_t multiplier() const noexcept { return variants.size() + 1; }

  bool operator==(const AugmentationPlan&) const = default;
};

void to_json(nlohmann::json& j, const AugmentationVariant& v);
void from_json(const nlohmann::json& j, AugmentationVariant& v);
void to_json(nlohmann::json& j, const AugmentationPlan& p);
void from_json(const nlohmann::json& j, AugmentationPlan& p);

AudioBuffer apply_variant(const AudioBuffer& buffer, const AugmentationVariant& variant,
                          std::uint64_t seed);

// Copies every original into out_dir, writes <id>__<tag>.wav for every
// variant and returns the merged manifest rooted at out_dir (originals first,
// each followed by its variants). Files written by a failed run are removed.
DatasetManifest augment_dataset(const DatasetManifest& manifest, const AugmentationPlan& plan,
                                const std::filesystem::path& out_dir, int jobs = 1);

}  // namespace convser
