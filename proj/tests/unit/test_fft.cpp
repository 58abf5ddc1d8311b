#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "convser/errors.hpp"
#include "convser/fft.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace convser;

TEST(Fft, ImpulseIsFlat) {
  const auto p = fft_power_spectrum(std::vector<double>{1, 0, 0, 0});
  EXPECT_EQ(p, (std::vector<double>{1, 1, 1}));
}

TEST(Fft, ConstantIsDcOnly) {
  const auto p = fft_power_spectrum(std::vector<double>{1, 1, 1, 1});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p[0], 16.0);
  EXPECT_NEAR(p[1], 0.0, 1e-24);
  EXPECT_NEAR(p[2], 0.0, 1e-24);
}

TEST(Fft, NonPowerOfTwoIsSizeError) {
  EXPECT_THROW(fft_power_spectrum(std::vector<double>(12, 0.0)), SizeError);
  EXPECT_THROW(fft_power_spectrum(std::vector<double>{}), SizeError);
}

TEST(Fft, Random1024MatchesNaiveDft) {
  std::mt19937_64 rng(1024);
  const auto x = testing_support::uniform_vector(1024, rng);
  const auto fast = fft_power_spectrum(x);
  const auto slow = oracle::dft_power(x);
  ASSERT_EQ(fast.size(), slow.size());
  double peak = 0.0;
  for (double v : slow) peak = std::max(peak, v);
  for (std::size_t k = 0; k < fast.size(); ++k) EXPECT_LE(std::abs(fast[k] - slow[k]) / peak, 1e-9) << k;
}

TEST(Fft, ParsevalHolds) {
  std::mt19937_64 rng(9);
  for (std::size_t n : {8u, 256u, 4096u}) {
    const auto x = testing_support::uniform_vector(n, rng);
    std::vector<std::complex<double>> z(x.begin(), x.end());
    fft_inplace(z);
    double time = 0.0, freq = 0.0;
    for (double v : x) time += v * v;
    for (const auto& c : z) freq += std::norm(c);
    EXPECT_LE(std::abs(time - freq / static_cast<double>(n)) / time, 1e-9) << n;
  }
}

TEST(Fft, PowerOfTwoPredicate) {
  EXPECT_TRUE(is_power_of_two(1));
  EXPECT_TRUE(is_power_of_two(8192));
  EXPECT_FALSE(is_power_of_two(0));
  EXPECT_FALSE(is_power_of_two(6));
}
