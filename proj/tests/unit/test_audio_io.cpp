#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "convser/audio_io.hpp"
#include "convser/errors.hpp"
#include "convser/fft.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace convser;
using testing_support::TempDir;

namespace {

// Hand-assembled RIFF file, independent of write_wav.
std::string riff(std::uint16_t format, std::uint16_t channels, std::uint32_t rate, std::uint16_t bits,
                 const std::string& payload) {
  auto u16 = [](std::string& s, std::uint16_t v) {
    s.push_back(char(v & 0xFF));
    s.push_back(char(v >> 8));
  };
  auto u32 = [](std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xFF));
  };
  std::string fmt;
  u16(fmt, format);
  u16(fmt, channels);
  u32(fmt, rate);
  u32(fmt, rate * channels * bits / 8);
  u16(fmt, static_cast<std::uint16_t>(channels * bits / 8));
  u16(fmt, bits);
  std::string body = "WAVE";
  body += "fmt ";
  u32(body, static_cast<std::uint32_t>(fmt.size()));
  body += fmt;
  body += "data";
  u32(body, static_cast<std::uint32_t>(payload.size()));
  body += payload;
  std::string out = "RIFF";
  u32(out, static_cast<std::uint32_t>(body.size()));
  return out + body;
}

void dump(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  f << bytes;
}

std::string pcm16(const std::vector<std::int16_t>& v) {
  std::string s;
  for (auto x : v) {
    const auto u = static_cast<std::uint16_t>(x);
    s.push_back(char(u & 0xFF));
    s.push_back(char(u >> 8));
  }
  return s;
}

}  // namespace

TEST(AudioIo, SilenceFileLoadsAsZeros) {
  TempDir dir("wav");
  dump(dir / "s.wav", riff(1, 1, 44100, 16, std::string(44100 * 2, '\0')));
  const AudioBuffer b = load_wav(dir / "s.wav");
  EXPECT_EQ(b.sample_rate, 44100);
  ASSERT_EQ(b.size(), 44100u);
  for (double s : b.samples) EXPECT_EQ(s, 0.0);
}

TEST(AudioIo, SineRoundTripWithinOneQuantizationStep) {
  TempDir dir("wav");
  const AudioBuffer original = testing_support::sine(440.0, 1.0, 44100, 1.0);
  write_wav(original, dir / "sine.wav");
  const AudioBuffer back = load_wav(dir / "sine.wav");
  ASSERT_EQ(back.size(), original.size());
  for (std::size_t i = 0; i < back.size(); ++i)
    ASSERT_LE(std::abs(back.samples[i] - original.samples[i]), 1.0 / 32768.0) << i;
}

TEST(AudioIo, RandomRoundTripWithinOneQuantizationStep) {
  TempDir dir("wav");
  std::mt19937_64 rng(3);
  AudioBuffer b;
  b.sample_rate = 22050;
  b.samples = testing_support::uniform_vector(5000, rng);
  write_wav(b, dir / "r.wav");
  const AudioBuffer back = load_wav(dir / "r.wav");
  EXPECT_EQ(back.sample_rate, 22050);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(back.samples[i] - b.samples[i]));
  EXPECT_LE(worst, 1.0 / 32768.0);
}

TEST(AudioIo, WriteClipsInsteadOfWrapping) {
  TempDir dir("wav");
  AudioBuffer b;
  b.samples = {2.0, -2.0, 0.0};
  write_wav(b, dir / "c.wav");
  std::ifstream f(dir / "c.wav", std::ios::binary);
  std::vector<char> bytes{std::istreambuf_iterator<char>(f), {}};
  ASSERT_EQ(bytes.size(), 44u + 6u);
  std::int16_t first, second;
  std::memcpy(&first, bytes.data() + 44, 2);
  std::memcpy(&second, bytes.data() + 46, 2);
  EXPECT_EQ(first, 32767);
  EXPECT_EQ(second, -32768);
  EXPECT_DOUBLE_EQ(load_wav(dir / "c.wav").samples[0], 32767.0 / 32768.0);
}

TEST(AudioIo, ZerosBufferWritesZeroSamples) {
  TempDir dir("wav");
  AudioBuffer b;
  b.samples.assign(100, 0.0);
  write_wav(b, dir / "z.wav");
  for (double s : load_wav(dir / "z.wav").samples) EXPECT_EQ(s, 0.0);
}

TEST(AudioIo, StereoIsAveraged) {
  TempDir dir("wav");
  dump(dir / "st.wav", riff(1, 2, 8000, 16, pcm16({1000, 3000, -2000, -2000, 16384, 0})));
  const AudioBuffer b = load_wav(dir / "st.wav");
  ASSERT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b.samples[0], 2000.0 / 32768.0);
  EXPECT_DOUBLE_EQ(b.samples[1], -2000.0 / 32768.0);
  EXPECT_DOUBLE_EQ(b.samples[2], 8192.0 / 32768.0);
}

TEST(AudioIo, IdenticalChannelsDownmixToEitherChannel) {
  TempDir dir("wav");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-32768, 32767);
  std::vector<std::int16_t> inter, mono;
  for (int i = 0; i < 500; ++i) {
    const auto v = static_cast<std::int16_t>(d(rng));
    inter.push_back(v);
    inter.push_back(v);
    mono.push_back(v);
  }
  dump(dir / "st.wav", riff(1, 2, 16000, 16, pcm16(inter)));
  dump(dir / "mo.wav", riff(1, 1, 16000, 16, pcm16(mono)));
  EXPECT_EQ(load_wav(dir / "st.wav").samples, load_wav(dir / "mo.wav").samples);
}

TEST(AudioIo, Float32Payload) {
  TempDir dir("wav");
  const float values[] = {0.25f, -0.75f, 1.5f};
  std::string payload(reinterpret_cast<const char*>(values), sizeof values);
  dump(dir / "f.wav", riff(3, 1, 48000, 32, payload));
  const AudioBuffer b = load_wav(dir / "f.wav");
  EXPECT_EQ(b.sample_rate, 48000);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.samples[0], 0.25);
  EXPECT_EQ(b.samples[1], -0.75);
  EXPECT_EQ(b.samples[2], 1.5);
}

TEST(AudioIo, NonRiffIsFormatError) {
  TempDir dir("wav");
  dump(dir / "bad.wav", "RIFX" + std::string(60, '\0'));
  EXPECT_THROW(load_wav(dir / "bad.wav"), FormatError);
  dump(dir / "tiny.wav", "RI");
  EXPECT_THROW(load_wav(dir / "tiny.wav"), FormatError);
}

TEST(AudioIo, CompressedEncodingIsUnsupported) {
  TempDir dir("wav");
  dump(dir / "adpcm.wav", riff(2, 1, 8000, 4, std::string(16, '\0')));
  EXPECT_THROW(load_wav(dir / "adpcm.wav"), UnsupportedCodecError);
  dump(dir / "pcm24.wav", riff(1, 1, 8000, 24, std::string(12, '\0')));
  EXPECT_THROW(load_wav(dir / "pcm24.wav"), UnsupportedCodecError);
}

TEST(AudioIo, MissingFileIsIoError) {
  EXPECT_THROW(load_wav("/nonexistent/dir/x.wav"), IoError);
  AudioBuffer b;
  b.samples = {0.0};
  EXPECT_THROW(write_wav(b, "/nonexistent/dir/x.wav"), IoError);
}

TEST(Resample, EqualRatesAreIdentity) {
  std::mt19937_64 rng(5);
  AudioBuffer b;
  b.samples = testing_support::uniform_vector(1234, rng);
  const AudioBuffer r = resample_linear(b, 44100);
  EXPECT_EQ(r.samples, b.samples);
  EXPECT_EQ(r.sample_rate, 44100);
}

TEST(Resample, ConstantStaysConstant) {
  for (auto [from, to] : {std::pair{8000, 44100}, {44100, 16000}, {22050, 48000}}) {
    AudioBuffer b;
    b.sample_rate = from;
    b.samples.assign(999, 0.5);
    const AudioBuffer r = resample_linear(b, to);
    EXPECT_EQ(r.size(), static_cast<std::size_t>(std::llround(999.0 * to / from)));
    for (double s : r.samples) ASSERT_NEAR(s, 0.5, 1e-15);
  }
}

TEST(Resample, DominantFrequencySurvivesUpsampling) {
  const AudioBuffer b = testing_support::sine(100.0, 0.512, 8000);  // 4096 samples
  const AudioBuffer r = resample_linear(b, 16000);
  ASSERT_EQ(r.size(), 8192u);
  const auto power = fft_power_spectrum(r.samples);
  const double hz = oracle::dominant_bin(power) * 16000.0 / 8192.0;
  EXPECT_NEAR(hz, 100.0, 16000.0 / 8192.0);
}

TEST(Resample, ToLengthHitsExactLength) {
  std::vector<double> v = {0.0, 1.0, 2.0, 3.0};
  const auto r = resample_to_length(v, 7);
  ASSERT_EQ(r.size(), 7u);
  EXPECT_DOUBLE_EQ(r.front(), 0.0);
  EXPECT_DOUBLE_EQ(r.back(), 3.0);
  EXPECT_DOUBLE_EQ(r[3], 1.5);
}
