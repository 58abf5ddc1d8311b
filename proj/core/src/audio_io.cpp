#include "convser/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "convser/errors.hpp"

namespace convser {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct WavFormat {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  const std::string where = path.string() + ": ";
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0)
    throw FormatError(where + "not a RIFF file");
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) throw FormatError(where + "not a WAVE file");

  WavFormat fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a data chunk whose declared size runs past EOF (streamed
      // writers leave it unpatched); anything else is corrupt.
      if (std::memcmp(chunk, "data", 4) != 0) throw FormatError(where + "truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError(where + "fmt chunk too small");
      fmt.format = read_u16(chunk + 8);
      fmt.channels = read_u16(chunk + 10);
      fmt.sample_rate = read_u32(chunk + 12);
      fmt.bits = read_u16(chunk + 22);
      if (fmt.format == kFormatExtensible) {
        if (size < 40) throw FormatError(where + "extensible fmt chunk too small");
        fmt.format = read_u16(chunk + 32);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw FormatError(where + "missing fmt chunk");
  if (data == nullptr) throw FormatError(where + "missing data chunk");
  if (fmt.channels != 1 && fmt.channels != 2)
    throw UnsupportedCodecError(where + std::to_string(fmt.channels) + " channels");
  if (fmt.sample_rate == 0) throw FormatError(where + "sample rate is zero");

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !float32)
    throw UnsupportedCodecError(where + "format tag " + std::to_string(fmt.format) + " with " +
                                std::to_string(fmt.bits) + " bits per sample");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = data_size / frame_bytes;

  AudioBuffer out;
  out.sample_rate = static_cast<int>(fmt.sample_rate);
  out.samples.resize(frames);
  auto decode = [&](const unsigned char* p) -> double {
    if (pcm16) return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    return static_cast<double>(std::bit_cast<float>(read_u32(p)));
  };
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* p = data + i * frame_bytes;
    if (fmt.channels == 1) {
      out.samples[i] = decode(p);
    } else {
      out.samples[i] = (decode(p) + decode(p + bytes_per_sample)) / 2.0;
    }
  }
  return out;
}

void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path) {
  if (buffer.empty()) throw ParameterError("write_wav: empty buffer");
  if (buffer.sample_rate <= 0) throw ParameterError("write_wav: sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(buffer.size() * 2);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double x : buffer.samples) {
    const double clipped = std::clamp(std::isnan(x) ? 0.0 : x, -1.0, 1.0);
    const long q = std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

AudioBuffer resample_linear(const AudioBuffer& buffer, int target_rate) {
  if (target_rate <= 0) throw ParameterError("resample_linear: target rate must be positive");
  if (buffer.sample_rate <= 0) throw ParameterError("resample_linear: source rate must be positive");
  if (target_rate == buffer.sample_rate) return buffer;

  const double ratio = static_cast<double>(target_rate) / buffer.sample_rate;
  const auto out_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(buffer.size()) * ratio));
  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  if (buffer.empty()) return out;
  const std::size_t last = buffer.size() - 1;
  const double step = static_cast<double>(buffer.sample_rate) / target_rate;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto left = static_cast<std::size_t>(pos);
    if (left >= last) {
      out.samples[i] = buffer.samples[last];
      continue;
    }
    const double frac = pos - static_cast<double>(left);
    out.samples[i] = buffer.samples[left] + frac * (buffer.samples[left + 1] - buffer.samples[left]);
  }
  return out;
}

std::vector<double> resample_to_length(const std::vector<double>& samples, std::size_t length) {
  std::vector<double> out(length, 0.0);
  if (samples.empty() || length == 0) return out;
  if (length == samples.size()) return samples;
  if (length == 1 || samples.size() == 1) {
    std::fill(out.begin(), out.end(), samples.front());
    return out;
  }
  const double step = static_cast<double>(samples.size() - 1) / static_cast<double>(length - 1);
  const std::size_t last = samples.size() - 1;
  for (std::size_t i = 0; i < length; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto left = std::min(static_cast<std::size_t>(pos), last);
    if (left == last) {
      out[i] = samples[last];
      continue;
    }
    const double frac = pos - static_cast<double>(left);
    out[i] = samples[left] + frac * (samples[left + 1] - samples[left]);
  }
  return out;
}

}  // namespace convser
