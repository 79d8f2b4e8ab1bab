#include "pitchlab/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "pitchlab/error.hpp"
#include "pitchlab/fft.hpp"
#include "pitchlab/kernels.hpp"

namespace pitchlab {

bool Spectrum::all_zero() const noexcept {
  return std::all_of(magnitudes.begin(), magnitudes.end(), [](double m) { return m == 0.0; });
}

double Spectrum::at_hz(double hz) const noexcept {
  if (bin_hz <= 0.0 || hz < 0.0) return 0.0;
  const double pos = std::floor(hz / bin_hz + 0.5);
  if (pos >= static_cast<double>(magnitudes.size())) return 0.0;
  return magnitudes[static_cast<std::size_t>(pos)];
}

Spectrum magnitude_spectrum(const Frame& frame) {
  const std::size_t n = frame.size();
  if (!fft::is_power_of_two(n)) {
    throw Error(Errc::non_power_of_two, "frame length " + std::to_string(n) + " is not a power of two");
  }
  const auto bins = fft::forward(frame.samples);
  Spectrum s;
  s.magnitudes.resize(bins.size());
  kernels::magnitude(bins, s.magnitudes);
  s.bin_hz = frame.sample_rate > 0 ? static_cast<double>(frame.sample_rate) / static_cast<double>(n) : 0.0;
  return s;
}

Spectrogram make_spectrogram(std::span<const Frame> frames, std::size_t hop, WindowKind kind) {
  Spectrogram sg;
  sg.hop = hop;
  sg.frames.reserve(frames.size());
  for (const Frame& f : frames) {
    sg.frames.push_back(magnitude_spectrum(f.window == kind ? f : apply_window(f, kind)));
  }
  return sg;
}

}  // namespace pitchlab
