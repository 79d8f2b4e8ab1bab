#include "pitchlab/audio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pitchlab/error.hpp"
#include "pitchlab/kernels.hpp"

namespace pitchlab {

AudioBuffer::AudioBuffer(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw Error(Errc::invalid_audio, "sample rate must be positive, got " + std::to_string(sample_rate_));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw Error(Errc::invalid_audio, "non-finite sample at index " + std::to_string(i));
    }
  }
}

std::span<const double> AudioBuffer::slice_seconds(double begin_sec, double end_sec) const noexcept {
  const auto to_index = [&](double t) {
    const double idx = std::floor(t * sample_rate_ + 0.5);
    return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(samples_.size())));
  };
  const std::size_t b = to_index(begin_sec);
  const std::size_t e = std::max(b, to_index(end_sec));
  return std::span<const double>(samples_).subspan(b, e - b);
}

double AudioBuffer::power() const noexcept {
  if (samples_.empty()) return 0.0;
  return kernels::sum_squares(samples_) / static_cast<double>(samples_.size());
}

double AudioBuffer::rms() const noexcept { return std::sqrt(power()); }

}  // namespace pitchlab
