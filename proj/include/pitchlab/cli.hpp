#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace pitchlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitBadAnnotation = 3;
inline constexpr int kExitNoSongs = 4;

struct EstimateOptions {
  std::filesystem::path audio;
  std::filesystem::path annotation;
  std::string method = "ensemble";
  std::optional<std::filesystem::path> ensemble_spec;
  std::optional<std::filesystem::path> method_configs;
};

/// Prints "onset offset f0_hz midi" per note ("unvoiced" for both values
/// when no pitch is found). wall_time_s receives the estimation time.
int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err,
                 double* wall_time_s = nullptr);

struct MixOptions {
  std::filesystem::path song;
  std::string noise;  // WAV path or "synth:<kind>"
  std::string snr_db;
  std::filesystem::path out;
  std::uint64_t seed = 1;
};

int cmd_mix(const MixOptions& options, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> noise_dir;
  std::optional<std::string> methods;  // comma separated
  unsigned jobs = 1;
};

/// Writes results.csv (long form), table.csv and table.txt into the output
/// directory and prints the summary table on stdout.
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::filesystem::path csv;
  std::string format = "text";
};

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

struct SynthOptions {
  std::filesystem::path out_wav;
  std::filesystem::path out_notes;
  std::uint64_t seed = 1;
  double duration_s = 0.0;
};

int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

/// Full command line front end (CLI11).
int run(int argc, char** argv);

/// Parses "+20", "20", "-5.5"; throws std::invalid_argument otherwise.
double parse_snr(const std::string& text);

}  // namespace pitchlab::cli
