#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pitchlab/estimators.hpp"

namespace pitchlab {

/// A pitch estimator living in another process. Each call launches
/// `command` through /bin/sh in a fresh process group, writes the request to
/// its stdin and reads a single reply line from its stdout. The group is
/// killed once the reply is in or the timeout passes.
///
/// Request:  "RATE <hz> COUNT <n>\n" followed by n little-endian float32 samples.
/// Reply:    "F0 <hz>\n" or "UNVOICED\n".
struct ExternalEstimator {
  std::string command;
  double timeout_s = 10.0;
  double f_min = 33.0;
  double f_max = 3951.0;
  std::string name = "external";

  void validate() const;
};

/// Environment variable that replaces ExternalEstimator::command.
inline constexpr const char* kExternalEnvVar = "PITCHLAB_EXTERNAL";

/// Header line plus raw float32 payload.
std::string encode_external_request(std::span<const double> samples, int sample_rate);

/// Parses one reply line (with or without the trailing newline). Returns the
/// frequency for "F0 <hz>" with a finite positive hz, nullopt for
/// "UNVOICED"; anything else throws Errc::protocol_violation.
std::optional<double> parse_external_reply(std::string_view line);

/// Never throws for estimator-side failures: timeouts, protocol violations,
/// launch failures and out-of-range replies all come back Unvoiced with a
/// warning on the log.
PitchEstimate run_external(const ExternalEstimator& estimator, std::span<const double> samples,
                           int sample_rate);

}  // namespace pitchlab
