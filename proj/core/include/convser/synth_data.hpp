#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "convser/dsp_features.hpp"
#include "convser/manifest.hpp"

namespace convser {

// Acoustic fingerprint of one class of synthetic recordings.
struct ClassSignature {
  double fundamental_hz = 160.0;
  double am_rate_hz = 4.0;
  double tilt_db_per_octave = -6.0;

  bool operator==(const ClassSignature&) const = default;
};

// Per-recording random perturbations.
struct SynthJitter {
  double fundamental_rel = 0.03;  // +- fraction of f0
  double am_rate_rel = 0.10;
  double tilt_db = 0.5;
  double level_db = 2.0;
  bool random_phase = true;

  bool operator==(const SynthJitter&) const = default;
};

struct SynthSpec {
  int n_originals = 38;
  double duration_s = 10.0;
  int sample_rate = kPipelineSampleRate;
  ClassSignature class0{160.0, 4.0, -6.0};
  ClassSignature class1{160.0, 8.0, -3.0};
  SynthJitter jitter;
  double am_depth = 0.5;
  double noise_level = 0.003;  // std-dev of the background noise
  std::uint64_t seed = 42;

  // Both classes share class0's signature: labels carry no acoustic signal.
  static SynthSpec null_corpus(std::uint64_t seed = 42);

  bool separable() const noexcept { return !(class0 == class1); }
  void validate() const;
};

void to_json(nlohmann::json& j, const ClassSignature& s);
void from_json(const nlohmann::json& j, ClassSignature& s);
void to_json(nlohmann::json& j, const SynthSpec& s);
void from_json(const nlohmann::json& j, SynthSpec& s);

// Label assigned to the i-th generated record (alternating, starting at 1).
int synth_label(int index);

AudioBuffer synthesize_recording(const SynthSpec& spec, int index);

// Writes s000.wav ... plus manifest.jsonl and synth_spec.json into out_dir.
DatasetManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                int jobs = 1);

// Leave-one-out accuracy of the best single-coefficient threshold rule over
// per-utterance coefficient means (rows = utterances). A sample sitting
// exactly on the threshold earns half credit, so a corpus with no
// information scores exactly 0.5.
double threshold_loo_accuracy(const Eigen::MatrixXd& utterance_means, std::span<const int> labels);

// Mean of each coefficient over the valid frames.
Eigen::RowVectorXd utterance_means(const FeatureMatrix& features);

double measure_separability(const DatasetManifest& manifest, const FeatureConfig& config,
                            int jobs = 1);

}  // namespace convser
