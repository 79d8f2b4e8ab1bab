#include "pitchlab/error.hpp"

namespace pitchlab {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::empty_buffer: return "EmptyBuffer";
    case Errc::invalid_audio: return "InvalidAudio";
    case Errc::non_power_of_two: return "NonPowerOfTwo";
    case Errc::lag_out_of_range: return "LagOutOfRange";
    case Errc::config_out_of_range: return "ConfigOutOfRange";
    case Errc::lpc_unstable: return "LpcUnstable";
    case Errc::external_timeout: return "ExternalTimeout";
    case Errc::protocol_violation: return "ProtocolViolation";
    case Errc::sample_rate_mismatch: return "SampleRateMismatch";
    case Errc::silent_noise: return "SilentNoise";
    case Errc::count_mismatch: return "CountMismatch";
    case Errc::non_positive_frequency: return "NonPositiveFrequency";
    case Errc::invalid_annotation: return "InvalidAnnotation";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::unknown_method: return "UnknownMethod";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace pitchlab
