#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "convser/audio_io.hpp"

namespace convser {

// classic13: c1..c12 + frame log-energy.
// static40:  c0..c39.
// delta39e:  [c1..c12, energy] + first and second deltas (39) + energy again.
enum class FeatureMode { Classic13, Static40, Delta39e };

std::string_view to_string(FeatureMode m);
FeatureMode parse_feature_mode(std::string_view s);
int feature_width(FeatureMode m);

struct FeatureConfig {
  int sample_rate = kPipelineSampleRate;
  int frame_len = 8192;
  int hop = 8192;
  int n_mels = 64;
  int n_mfcc = 40;
  FeatureMode feature_mode = FeatureMode::Static40;
  double fmin = 0.0;
  double fmax = -1.0;  // <= 0 means sample_rate / 2
  double log_floor = 1e-10;
  int max_frames = 775;

  int n_fft() const noexcept { return frame_len; }
  double effective_fmax() const noexcept { return fmax > 0.0 ? fmax : sample_rate / 2.0; }

  // The 13-wide and 40-wide presets used by the model grid.
  static FeatureConfig mfcc13();
  static FeatureConfig mfcc40();

  // Throws ConfigError listing the first violated invariant.
  void validate() const;

  bool operator==(const FeatureConfig&) const = default;
};

void to_json(nlohmann::json& j, const FeatureConfig& c);
void from_json(const nlohmann::json& j, FeatureConfig& c);
std::uint64_t config_hash(const FeatureConfig& c);

// Frames x coefficients. Rows at and beyond n_valid_frames are zero padding.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  int n_valid_frames = 0;

  int frames() const noexcept { return static_cast<int>(values.rows()); }
  int width() const noexcept { return static_cast<int>(values.cols()); }
};

// Frame count is floor((len - frame_len) / hop) + 1; a partial tail frame is
// dropped. Throws TooShortError when the signal holds less than one frame.
std::vector<std::vector<double>> frame_signal(const AudioBuffer& buffer, int frame_len, int hop);

// w[k] = 0.54 - 0.46 cos(2 pi k / (n - 1)); n >= 2.
std::vector<double> hamming_window(int n);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters, n_mels rows by n_fft/2+1 columns. Centers are equally
// spaced in mel between fmin and fmax and snapped to FFT bins; each filter
// peaks at exactly 1.0 on its center bin. Throws ResolutionError when two
// adjacent edge/center points land on the same bin.
Eigen::MatrixXd mel_filterbank(const FeatureConfig& config);

// Center frequency (Hz) of each filter's peak bin.
std::vector<double> mel_center_frequencies(const FeatureConfig& config);

// e[m] = ln(sum_k fb(m,k) P[k] + log_floor)
std::vector<double> log_mel_energies(std::span<const double> power,
                                     const Eigen::MatrixXd& filterbank, double log_floor);

// Orthonormal DCT-II matrix, n_out x n_in.
Eigen::MatrixXd dct_matrix(int n_in, int n_out);
std::vector<double> dct_ii(std::span<const double> input, int n_out);

// ln(sum s^2 + log_floor) over the un-windowed frame.
double frame_log_energy(std::span<const double> frame, double log_floor);

// HTK regression delta with half-width `window`, replicating edge frames.
Eigen::MatrixXd delta(const Eigen::MatrixXd& features, int window = 2);

// Global zero-centering and max-abs scaling over the first n_valid rows.
// Rows past n_valid are left untouched (they are expected to be zero).
// A constant block maps to zeros.
Eigen::MatrixXd normalize_centered(const Eigen::MatrixXd& matrix, int n_valid);

// Raw (pre-normalization, unpadded) per-frame features for the configured mode.
Eigen::MatrixXd raw_features(const AudioBuffer& buffer, const FeatureConfig& config);

// The full pipeline: frame, window, power spectrum, mel, log, DCT, mode
// assembly, normalization, then zero-pad or truncate to max_frames.
// The buffer must already be at config.sample_rate (ConfigError otherwise).
FeatureMatrix extract_features(const AudioBuffer& buffer, const FeatureConfig& config);

}  // namespace convser
