#pragma once

#include <complex>
#include <span>
#include <vector>

namespace convser {

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 decimation-in-time FFT (forward, unscaled).
// Throws SizeError if the length is not a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

// Full two-sided spectrum of a real sequence.
std::vector<std::complex<double>> fft_real(std::span<const double> input);

// One-sided power spectrum |X[k]|^2 for k = 0..n/2.
std::vector<double> fft_power_spectrum(std::span<const double> frame);

}  // namespace convser
