#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pitchlab::fft {

/// Un-normalized real-to-complex forward DFT. Output has n/2 + 1 bins.
std::vector<std::complex<double>> forward(std::span<const double> input);

/// Inverse of forward() including the 1/n factor, so inverse(forward(x)) == x.
std::vector<double> inverse(std::span<const std::complex<double>> spectrum, std::size_t n);

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace pitchlab::fft
