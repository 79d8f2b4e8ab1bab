#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pitchlab/annotation.hpp"
#include "pitchlab/audio.hpp"

namespace pitchlab {

/// Band-limited tone from explicit partial amplitudes (index 0 = fundamental).
/// Partials at or above max_partial_hz are dropped.
std::vector<double> harmonic_tone(double f0, std::size_t length, int sample_rate,
                                  std::span<const double> partial_amplitudes,
                                  double max_partial_hz = 8000.0);

/// Band-limited sawtooth (partials 1/k) scaled to the given peak-ish amplitude.
std::vector<double> sawtooth(double f0, std::size_t length, int sample_rate, double amplitude = 0.5,
                             double max_partial_hz = 8000.0);

std::vector<double> sine(double f0, std::size_t length, int sample_rate, double amplitude = 0.5,
                         double phase = 0.0);

std::vector<double> square_wave(double f0, std::size_t length, int sample_rate, double amplitude = 0.5,
                                double max_partial_hz = 8000.0);

struct SongSynthParams {
  int sample_rate = 44100;
  int min_notes = 8;
  int max_notes = 20;
  int midi_low = 45;
  int midi_high = 69;
  double note_min_s = 0.35;
  double note_max_s = 0.8;
  double gap_s = 0.06;
  double amplitude = 0.4;
  // When positive, note count is chosen to fill roughly this duration and
  // min_notes/max_notes are ignored.
  double target_duration_s = 0.0;
};

struct SyntheticSong {
  AudioBuffer audio;
  std::vector<NoteSegment> notes;
};

/// Sawtooth melody from a seeded random walk over MIDI numbers, with a short
/// silence between notes and ground truth attached to every note.
SyntheticSong synth_song(std::uint64_t seed, const SongSynthParams& params = {});

}  // namespace pitchlab
