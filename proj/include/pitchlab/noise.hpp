#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pitchlab/audio.hpp"

namespace pitchlab {

enum class NoiseKind { white, pink, hum50, babble };
enum class NoiseOrigin { ingested_file, synthetic };

std::string_view noise_kind_name(NoiseKind kind) noexcept;
std::optional<NoiseKind> parse_noise_kind(std::string_view name) noexcept;

inline constexpr std::array<NoiseKind, 4> kSyntheticNoiseKinds = {
    NoiseKind::white, NoiseKind::pink, NoiseKind::hum50, NoiseKind::babble};

/// The 17 recorded noise types of the reference corpus, ids 1..17.
inline constexpr std::array<std::string_view, 17> kCorpusNoiseNames = {
    "white",      "babble",     "insect",     "surf",        "subway",     "campus",
    "ventilation", "car",       "train",      "conservator", "exhibition", "gaussian",
    "wilderness", "restaurant", "airport",    "street",      "office"};

/// Default SNR levels in dB.
inline constexpr std::array<double, 4> kDefaultSnrs = {-5.0, 0.0, 10.0, 20.0};

struct NoiseSource {
  int id = 0;
  std::string name;
  AudioBuffer buffer;
  NoiseOrigin origin = NoiseOrigin::synthetic;
};

struct Scenario {
  int noise_id = 0;
  double snr_db = 0.0;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct MixResult {
  AudioBuffer mixed;
  std::vector<double> noise_component;  // g * looped noise, exactly what was added
  double gain = 0.0;
  double achieved_snr_db = 0.0;
  std::size_t clipped_samples = 0;      // |mixed| > 1
};

/// Repeats (wrapping around) or truncates noise to `length` samples.
std::vector<double> loop_to_length(std::span<const double> noise, std::size_t length);

/// output = signal + g * noise, g = sqrt(Ps / (Pn 10^(snr/10))), powers
/// taken over the whole signal length. Not renormalized. Throws
/// Errc::sample_rate_mismatch, Errc::silent_noise, Errc::empty_buffer.
MixResult mix_at_snr(const AudioBuffer& signal, const NoiseSource& noise, double snr_db);

/// 10 log10(Ps / Pn). Errc::silent_noise when the noise has zero power.
double measure_snr(std::span<const double> signal, std::span<const double> noise_component);

/// Deterministic for a given seed. White is uniform iid, pink a -3 dB/octave
/// filtered white, hum50 a 50 Hz fundamental with odd harmonics, babble a sum
/// of 8 amplitude-modulated band-pass noise streams. Peak-normalized to 0.5.
NoiseSource synth_noise(NoiseKind kind, std::size_t length, int sample_rate, std::uint64_t seed);

/// The four synthetic kinds with ids 1..4 in kSyntheticNoiseKinds order.
std::vector<NoiseSource> synthetic_noise_set(std::size_t length, int sample_rate, std::uint64_t seed);

/// Loads files named "NN_<name>.wav" (NN = 01..17) from a corpus directory,
/// sorted by id. Other files are ignored.
std::vector<NoiseSource> load_noise_corpus(const std::filesystem::path& dir);

/// Cartesian product in (noise, snr) lexicographic order.
std::vector<Scenario> scenario_grid(std::span<const int> noise_ids, std::span<const double> snrs);

}  // namespace pitchlab
