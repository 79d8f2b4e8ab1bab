#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pitchlab/estimators.hpp"
#include "pitchlab/external.hpp"

namespace pitchlab {

struct EnsembleMember {
  Method method;
  EstimatorConfig config;
};

struct EnsembleSpec {
  std::vector<EnsembleMember> members;
  std::optional<ExternalEstimator> external;
  std::size_t quorum = 2;

  std::size_t member_count() const noexcept { return members.size() + (external ? 1 : 0); }

  /// At least two members, unique names, valid external.
  void validate() const;

  /// HPS, STFT, ML and SRH with their default configs.
  static EnsembleSpec defaults(int sample_rate);
};

/// Drops Unvoiced votes and takes the median of the rest (mean of the middle
/// two for an even count). nullopt when fewer than `quorum` votes remain.
std::optional<double> fuse_votes(std::span<const std::optional<double>> votes, std::size_t quorum = 2);

/// Runs every member on the note and fuses the votes. The external member,
/// if any, runs concurrently with the internal ones. per_frame carries the
/// member votes in spec order (external last).
PitchEstimate ensemble_estimate(std::span<const double> note, int sample_rate, const EnsembleSpec& spec,
                                const AnalysisParams& params = {});

/// JSON spec file:
///   { "members": ["hps", {"name": "ml", "f_min": 20, "f_max": 800, "n_harmonics": 5}, ...],
///     "external": {"command": "...", "timeout": 5, "f_min": 33, "f_max": 3951},
///     "quorum": 2 }
/// Missing "members" means the defaults. PITCHLAB_EXTERNAL, when set,
/// overrides (or supplies) the external command.
EnsembleSpec load_ensemble_spec(const std::filesystem::path& path, int sample_rate);
EnsembleSpec parse_ensemble_spec(std::string_view json_text, int sample_rate);

/// Applies PITCHLAB_EXTERNAL to a spec, attaching an external member when
/// the variable is set and non-empty.
void apply_external_override(EnsembleSpec& spec);

}  // namespace pitchlab
