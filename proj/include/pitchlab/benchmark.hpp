#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pitchlab/annotation.hpp"
#include "pitchlab/audio.hpp"
#include "pitchlab/ensemble.hpp"
#include "pitchlab/estimators.hpp"
#include "pitchlab/method_config.hpp"
#include "pitchlab/noise.hpp"

namespace pitchlab {

inline constexpr std::string_view kEnsembleName = "ensemble";

struct Song {
  std::string id;
  AudioBuffer audio;
  std::vector<NoteSegment> notes;
};

/// Songs dir convention: "<stem>.wav" next to "<stem>.txt", loaded in
/// filename order. Songs that fail to load are skipped with a warning and
/// counted in *failed.
std::vector<Song> load_song_dir(const std::filesystem::path& dir, std::size_t* failed = nullptr);

/// synth_song(seed + i) for i in [0, count).
std::vector<Song> synthetic_songs(std::size_t count, std::uint64_t seed, int sample_rate = 44100);

struct NoiseLabel {
  int id = 0;
  std::string name;
};

/// Mean errors per method and scenario. Cells are NaN when no song produced
/// a value. Per-noise columns average the SNR cells of that noise, and the
/// noisy average averages the per-noise columns.
struct ErrorReport {
  std::vector<std::string> methods;
  std::vector<NoiseLabel> noises;
  std::vector<double> snrs;
  // noisy[m][noise_index * snrs.size() + snr_index]
  std::vector<std::vector<double>> noisy;
  // clean[m]; empty when the clean column was not computed
  std::vector<double> clean;
  std::size_t songs_total = 0;
  std::size_t songs_failed = 0;

  bool has_clean() const noexcept { return !clean.empty(); }
  double cell(std::size_t method, std::size_t noise, std::size_t snr) const;
  double noise_average(std::size_t method, std::size_t noise) const;
  double noisy_average(std::size_t method) const;
  bool empty() const noexcept { return methods.empty() || (noisy.empty() && clean.empty()); }
};

struct BenchmarkOptions {
  std::vector<std::string> methods;  // registry names and/or "ensemble"
  std::vector<NoiseSource> noises;
  std::vector<double> snrs{kDefaultSnrs.begin(), kDefaultSnrs.end()};
  bool include_clean = true;
  std::optional<MethodConfigs> configs;  // per-method overrides
  std::optional<EnsembleSpec> ensemble;  // defaults when unset
  AnalysisParams params;
  unsigned jobs = 1;
};

/// For each (song, scenario) and the clean condition: mix, cut notes by the
/// annotation, estimate with every method and score each song. Cells are
/// means over the songs that succeeded. Songs that throw are counted in
/// songs_failed and left out of every cell. Output is independent of jobs.
ErrorReport run_benchmark(const std::vector<Song>& songs, const BenchmarkOptions& options);

enum class ReportFormat { csv, text };

/// Wide table, methods as rows and noises as columns (SNR-averaged), then
/// clean and noisy-average summary columns.
std::string render_report(const ErrorReport& report, ReportFormat format);

/// Long form: "method,noise_id,snr_db,error", one row per cell. Clean rows
/// use noise_id "clean" and an empty snr_db.
std::string render_long_csv(const ErrorReport& report);

/// Inverse of render_long_csv (noise names are not stored; ids are used).
ErrorReport parse_long_csv(std::string_view csv);

/// Benchmark config file (JSON):
///   { "songs_dir": "...", "synthetic_songs": 5, "noise_dir": "...",
///     "synthetic_noises": ["white", "pink", "hum50", "babble"],
///     "noise_length_s": 10, "snrs": [-5, 0, 10, 20], "methods": [...],
///     "include_clean": true, "seed": 1, "ensemble_spec": "...",
///     "method_configs": "...", "out_dir": "..." }
/// Relative paths resolve against the config file's directory.
struct BenchmarkConfig {
  std::optional<std::filesystem::path> songs_dir;
  std::size_t synthetic_songs = 5;
  std::optional<std::filesystem::path> noise_dir;
  std::vector<NoiseKind> synthetic_noises{kSyntheticNoiseKinds.begin(), kSyntheticNoiseKinds.end()};
  double noise_length_s = 10.0;
  std::vector<double> snrs{kDefaultSnrs.begin(), kDefaultSnrs.end()};
  std::vector<std::string> methods;
  bool include_clean = true;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> ensemble_spec;
  std::optional<std::filesystem::path> method_configs;
  std::optional<std::filesystem::path> out_dir;
  int sample_rate = 44100;
};

BenchmarkConfig load_benchmark_config(const std::filesystem::path& path);
BenchmarkConfig parse_benchmark_config(std::string_view json_text, const std::filesystem::path& base_dir);

/// All registry names followed by "ensemble".
std::vector<std::string> default_benchmark_methods();

}  // namespace pitchlab
