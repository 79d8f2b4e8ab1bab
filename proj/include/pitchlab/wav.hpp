#pragma once

#include <filesystem>

#include "pitchlab/audio.hpp"

namespace pitchlab {

struct WavInfo {
  int channels = 0;
  int bits_per_sample = 0;
  bool is_float = false;
  std::size_t clamped_samples = 0;  // out-of-range samples hard-clipped on ingest
};

/// Reads PCM 16/24/32-bit integer or 32/64-bit float WAV. Multi-channel
/// input is downmixed by averaging. Samples outside [-1, 1] are clipped,
/// non-finite samples are rejected (Errc::invalid_audio).
AudioBuffer read_wav(const std::filesystem::path& path, WavInfo* info = nullptr);

/// Writes a mono 32-bit float WAV. Values are written as-is (no clipping).
void write_wav_float(const std::filesystem::path& path, const AudioBuffer& audio);

/// Writes a mono 16-bit PCM WAV, clipping to [-1, 1].
void write_wav_pcm16(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace pitchlab
