#pragma once

#include <span>
#include <vector>

namespace pitchlab {

/// Mono sample sequence plus its sample rate.
///
/// Construction checks that every sample is finite and the rate is
/// positive. The [-1, 1] range is enforced at ingestion (see wav.hpp);
/// mixed buffers may exceed it when noise mixing clips.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(std::vector<double> samples, int sample_rate);

  std::span<const double> samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double duration() const noexcept {
    return sample_rate_ > 0 ? static_cast<double>(samples_.size()) / sample_rate_ : 0.0;
  }

  /// Samples in [begin_sec, end_sec), clamped to the buffer.
  std::span<const double> slice_seconds(double begin_sec, double end_sec) const noexcept;

  /// Mean squared amplitude; 0 for an empty buffer.
  double power() const noexcept;
  double rms() const noexcept;

 private:
  std::vector<double> samples_;
  int sample_rate_ = 0;
};

}  // namespace pitchlab
