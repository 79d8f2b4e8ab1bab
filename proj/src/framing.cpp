#include "pitchlab/framing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "pitchlab/error.hpp"
#include "pitchlab/kernels.hpp"

namespace pitchlab {

double Frame::rms() const noexcept {
  if (samples.empty()) return 0.0;
  return std::sqrt(kernels::sum_squares(samples) / static_cast<double>(samples.size()));
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
  }
  return w;
}

std::span<const double> cached_hann(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const std::vector<double>>(hann_window(n));
  return *slot;
}

Frame apply_window(const Frame& frame, WindowKind kind) {
  Frame out = frame;
  if (kind == WindowKind::hann) {
    kernels::multiply(frame.samples, cached_hann(frame.size()), out.samples);
    out.window = WindowKind::hann;
  }
  return out;
}

Frame zero_pad(const Frame& frame, std::size_t length) {
  Frame out = frame;
  if (length > out.samples.size()) out.samples.resize(length, 0.0);
  return out;
}

std::vector<Frame> frame_signal(std::span<const double> samples, int sample_rate, std::size_t frame_len,
                                std::size_t hop, WindowKind kind) {
  if (samples.empty()) throw Error(Errc::empty_buffer, "cannot frame an empty signal");
  if (frame_len == 0 || hop == 0) throw Error(Errc::lag_out_of_range, "frame length and hop must be positive");

  std::vector<Frame> frames;
  const auto make = [&](std::size_t start) {
    Frame f;
    f.samples.assign(frame_len, 0.0);
    const std::size_t n = std::min(frame_len, samples.size() - start);
    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(start), n, f.samples.begin());
    f.start_index = start;
    f.sample_rate = sample_rate;
    return kind == WindowKind::rectangular ? f : apply_window(f, kind);
  };

  if (samples.size() < frame_len) {
    frames.push_back(make(0));
    return frames;
  }
  const std::size_t count = (samples.size() - frame_len) / hop + 1;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) frames.push_back(make(i * hop));
  return frames;
}

std::vector<Frame> frame_signal(const AudioBuffer& buffer, std::size_t frame_len, std::size_t hop,
                                WindowKind kind) {
  return frame_signal(buffer.samples(), buffer.sample_rate(), frame_len, hop, kind);
}

}  // namespace pitchlab
