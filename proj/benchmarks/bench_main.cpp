#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "convser/dsp_features.hpp"
#include "convser/fft.hpp"
#include "convser/neural_net.hpp"

namespace {

Eigen::MatrixXd random_features(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = d(rng);
  return m;
}

void BM_PowerSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.01 * static_cast<double>(i));
  for (auto _ : state) benchmark::DoNotOptimize(convser::fft_power_spectrum(x));
}
BENCHMARK(BM_PowerSpectrum)->Arg(1024)->Arg(8192);

// Ten seconds of a 220 Hz tone through the full 40-wide pipeline.
void BM_ExtractTenSeconds(benchmark::State& state) {
  convser::AudioBuffer b;
  b.sample_rate = 44100;
  b.samples.resize(441000);
  for (std::size_t i = 0; i < b.samples.size(); ++i)
    b.samples[i] = 0.3 * std::sin(2.0 * std::numbers::pi * 220.0 * static_cast<double>(i) / 44100.0);
  const auto cfg = convser::FeatureConfig::mfcc40();
  for (auto _ : state) benchmark::DoNotOptimize(convser::extract_features(b, cfg));
}
BENCHMARK(BM_ExtractTenSeconds)->Unit(benchmark::kMillisecond);

// One sample's forward+backward for the smallest and largest grid cells.
void BM_ForwardBackward(benchmark::State& state) {
  const bool large = state.range(0) != 0;
  const convser::ModelConfig cfg{large ? 32 : 16, large ? 20 : 5, large ? 40 : 20, large ? 40 : 13, 56};
  const auto params = convser::ModelParams::glorot(cfg, 1);
  const auto x = random_features(cfg.max_frames, cfg.n_mfcc, 2);
  for (auto _ : state) {
    const auto fw = convser::model_forward(cfg, x, params);
    benchmark::DoNotOptimize(convser::model_backward(cfg, fw.trace, 1, params));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
