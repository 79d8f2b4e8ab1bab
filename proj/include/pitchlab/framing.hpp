#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pitchlab/audio.hpp"

namespace pitchlab {

enum class WindowKind { rectangular, hann };

struct Frame {
  std::vector<double> samples;
  std::size_t start_index = 0;
  WindowKind window = WindowKind::rectangular;
  int sample_rate = 0;

  std::size_t size() const noexcept { return samples.size(); }
  double rms() const noexcept;
};

/// Periodic Hann: w[k] = 0.5 (1 - cos(2 pi k / n)).
std::vector<double> hann_window(std::size_t n);

/// Cached read-only periodic Hann of length n.
std::span<const double> cached_hann(std::size_t n);

/// Returns a copy of `frame` with `kind` applied on top of its samples.
Frame apply_window(const Frame& frame, WindowKind kind);

/// Copy of `frame` extended with trailing zeros to `length` (no-op if not longer).
Frame zero_pad(const Frame& frame, std::size_t length);

/// Splits a sample range into frames of frame_len with the given hop.
/// Produces floor((len - frame_len) / hop) + 1 frames; inputs shorter than
/// frame_len yield a single zero-padded frame.
std::vector<Frame> frame_signal(std::span<const double> samples, int sample_rate,
                                std::size_t frame_len, std::size_t hop, WindowKind kind);

std::vector<Frame> frame_signal(const AudioBuffer& buffer, std::size_t frame_len,
                                std::size_t hop, WindowKind kind);

}  // namespace pitchlab
