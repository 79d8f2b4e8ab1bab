#pragma once

#include <span>
#include <vector>

#include "pitchlab/framing.hpp"

namespace pitchlab {

/// Magnitudes for bins 0..N/2 of an N-point DFT.
struct Spectrum {
  std::vector<double> magnitudes;
  double bin_hz = 0.0;

  std::size_t size() const noexcept { return magnitudes.size(); }
  /// FFT length this spectrum came from.
  std::size_t fft_size() const noexcept { return magnitudes.empty() ? 0 : 2 * (magnitudes.size() - 1); }
  double nyquist() const noexcept { return bin_hz * static_cast<double>(fft_size()) / 2.0; }
  bool all_zero() const noexcept;
  /// Magnitude at the bin nearest hz, or 0 past Nyquist.
  double at_hz(double hz) const noexcept;
};

struct Spectrogram {
  std::vector<Spectrum> frames;
  std::size_t hop = 0;
};

/// |DFT| of the frame as stored (apply the window first). Frame length
/// must be a power of two (Errc::non_power_of_two).
Spectrum magnitude_spectrum(const Frame& frame);

/// Windows every frame with `kind` and stacks the magnitude spectra.
Spectrogram make_spectrogram(std::span<const Frame> frames, std::size_t hop, WindowKind kind);

}  // namespace pitchlab
