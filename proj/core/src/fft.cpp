#include "convser/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "convser/errors.hpp"

namespace convser {

void fft_inplace(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n))
    throw SizeError("FFT length " + std::to_string(n) + " is not a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  // Twiddles evaluated directly rather than by repeated multiplication, which
  // keeps the error at a few ulps even for long transforms.
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(angle), std::sin(angle)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> t = twiddle[k * stride] * data[start + k + half];
        const std::complex<double> u = data[start + k];
        data[start + k] = u + t;
        data[start + k + half] = u - t;
      }
    }
  }
}

std::vector<std::complex<double>> fft_real(std::span<const double> input) {
  std::vector<std::complex<double>> data(input.begin(), input.end());
  fft_inplace(data);
  return data;
}

std::vector<double> fft_power_spectrum(std::span<const double> frame) {
  const auto spectrum = fft_real(frame);
  std::vector<double> power(frame.size() / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spectrum[k]);
  return power;
}

}  // namespace convser
