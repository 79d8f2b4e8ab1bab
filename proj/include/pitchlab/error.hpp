#pragma once

#include <stdexcept>
#include <string>

namespace pitchlab {

enum class Errc {
  empty_buffer,
  invalid_audio,
  non_power_of_two,
  lag_out_of_range,
  config_out_of_range,
  lpc_unstable,
  external_timeout,
  protocol_violation,
  sample_rate_mismatch,
  silent_noise,
  count_mismatch,
  non_positive_frequency,
  invalid_annotation,
  invalid_config,
  unknown_method,
  io_error,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pitchlab
