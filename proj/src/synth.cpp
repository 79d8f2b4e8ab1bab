#include "pitchlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "pitchlab/error.hpp"

namespace pitchlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFadeSeconds = 0.01;

double midi_to_hz(int midi) { return 440.0 * std::pow(2.0, (midi - 69) / 12.0); }

}  // namespace

std::vector<double> harmonic_tone(double f0, std::size_t length, int sample_rate,
                                  std::span<const double> partial_amplitudes, double max_partial_hz) {
  if (!(f0 > 0.0) || sample_rate <= 0) throw Error(Errc::non_positive_frequency, "tone needs f0 > 0");
  std::vector<double> out(length, 0.0);
  const double limit = std::min(max_partial_hz, 0.5 * sample_rate);
  for (std::size_t k = 0; k < partial_amplitudes.size(); ++k) {
    const double f = f0 * static_cast<double>(k + 1);
    if (f >= limit) break;
    const double amp = partial_amplitudes[k];
    if (amp == 0.0) continue;
    // Phasor recurrence, re-seeded every block to bound drift.
    const double w = kTwoPi * f / sample_rate;
    const std::complex<double> step = std::polar(1.0, w);
    constexpr std::size_t kBlock = 1024;
    for (std::size_t b = 0; b < length; b += kBlock) {
      std::complex<double> z = std::polar(1.0, w * static_cast<double>(b));
      const std::size_t end = std::min(length, b + kBlock);
      for (std::size_t t = b; t < end; ++t) {
        out[t] += amp * z.imag();
        z *= step;
      }
    }
  }
  return out;
}

std::vector<double> sawtooth(double f0, std::size_t length, int sample_rate, double amplitude,
                             double max_partial_hz) {
  const auto count = static_cast<std::size_t>(std::max(1.0, std::floor(0.5 * sample_rate / f0)));
  std::vector<double> partials(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    partials[k] = sign * amplitude * (2.0 / std::numbers::pi) / static_cast<double>(k + 1);
  }
  return harmonic_tone(f0, length, sample_rate, partials, max_partial_hz);
}

std::vector<double> sine(double f0, std::size_t length, int sample_rate, double amplitude, double phase) {
  std::vector<double> out(length);
  const double w = kTwoPi * f0 / sample_rate;
  for (std::size_t t = 0; t < length; ++t) out[t] = amplitude * std::sin(w * static_cast<double>(t) + phase);
  return out;
}

std::vector<double> square_wave(double f0, std::size_t length, int sample_rate, double amplitude,
                                double max_partial_hz) {
  const auto count = static_cast<std::size_t>(std::max(1.0, std::floor(0.5 * sample_rate / f0)));
  std::vector<double> partials(count, 0.0);
  for (std::size_t k = 0; k < count; k += 2) {
    partials[k] = amplitude * (4.0 / std::numbers::pi) / static_cast<double>(k + 1);
  }
  return harmonic_tone(f0, length, sample_rate, partials, max_partial_hz);
}

SyntheticSong synth_song(std::uint64_t seed, const SongSynthParams& p) {
  std::mt19937_64 rng(seed);
  const auto uniform_int = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  const auto uniform_real = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  struct Planned {
    int midi;
    double duration;
  };
  std::vector<Planned> plan;
  int midi = uniform_int(p.midi_low, p.midi_high);
  double total = 0.1;
  const int fixed_count = uniform_int(p.min_notes, p.max_notes);
  while (p.target_duration_s > 0.0 ? total < p.target_duration_s - 0.1 : static_cast<int>(plan.size()) < fixed_count) {
    const double duration = uniform_real(p.note_min_s, p.note_max_s);
    plan.push_back({midi, duration});
    total += duration + p.gap_s;
    midi += uniform_int(-4, 4);
    if (midi < p.midi_low) midi = 2 * p.midi_low - midi;
    if (midi > p.midi_high) midi = 2 * p.midi_high - midi;
    midi = std::clamp(midi, p.midi_low, p.midi_high);
  }

  const double fs = p.sample_rate;
  std::vector<double> audio;
  std::vector<NoteSegment> notes;
  auto append_silence = [&](double seconds) {
    audio.resize(audio.size() + static_cast<std::size_t>(std::llround(seconds * fs)), 0.0);
  };
  append_silence(0.1);
  for (const Planned& n : plan) {
    const std::size_t start = audio.size();
    const auto length = static_cast<std::size_t>(std::llround(n.duration * fs));
    const double f0 = midi_to_hz(n.midi);
    auto tone = sawtooth(f0, length, p.sample_rate, p.amplitude);
    const auto fade = std::min(length / 2, static_cast<std::size_t>(kFadeSeconds * fs));
    for (std::size_t i = 0; i < fade; ++i) {
      const double g = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(fade)));
      tone[i] *= g;
      tone[length - 1 - i] *= g;
    }
    audio.insert(audio.end(), tone.begin(), tone.end());
    notes.push_back({static_cast<double>(start) / fs, static_cast<double>(start + length) / fs, f0});
    append_silence(p.gap_s);
  }
  append_silence(0.1 - p.gap_s > 0 ? 0.1 - p.gap_s : 0.0);
  return SyntheticSong{AudioBuffer(std::move(audio), p.sample_rate), std::move(notes)};
}

}  // namespace pitchlab
