#pragma once

#include <filesystem>
#include <vector>

namespace convser {

// Rate the whole pipeline runs at. 8192 samples at this rate is ~186 ms.
inline constexpr int kPipelineSampleRate = 44100;

// Mono PCM with amplitudes nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kPipelineSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_seconds() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads RIFF/WAVE with PCM16 or IEEE float32 payload, mono or stereo.
// Stereo is averaged to mono; PCM16 is scaled by 1/32768.
// Throws FormatError on a malformed container, UnsupportedCodecError on any
// other encoding and IoError when the file cannot be opened.
AudioBuffer load_wav(const std::filesystem::path& path);

// Writes 16-bit PCM mono little-endian. Amplitudes are clipped to [-1, 1]
// before quantization, so 2.0 is stored as 32767.
void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path);

// Linear-interpolation resampler. Output length is
// round(len * target_rate / sample_rate); equal rates return a copy.
AudioBuffer resample_linear(const AudioBuffer& buffer, int target_rate);

// Resamples to exactly `length` samples spanning the same time extent.
std::vector<double> resample_to_length(const std::vector<double>& samples,
                                       std::size_t length);

}  // namespace convser
