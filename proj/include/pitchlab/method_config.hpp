#pragma once

#include <array>
#include <filesystem>
#include <string_view>

#include "pitchlab/estimators.hpp"

namespace pitchlab {

/// One EstimatorConfig per registered method.
class MethodConfigs {
 public:
  explicit MethodConfigs(int sample_rate);

  const EstimatorConfig& get(Method method) const noexcept { return configs_[static_cast<std::size_t>(method)]; }
  void set(Method method, const EstimatorConfig& cfg) noexcept { configs_[static_cast<std::size_t>(method)] = cfg; }

  /// Overrides from a JSON object keyed by method name:
  ///   { "ml": {"f_min": 30, "n_harmonics": 4}, "srh": {"f_max": 600} }
  /// Absent keys keep their defaults. Unknown method names throw
  /// Errc::unknown_method, malformed values Errc::invalid_config.
  void apply_overrides(std::string_view json_text);
  void apply_overrides_file(const std::filesystem::path& path);

 private:
  std::array<EstimatorConfig, kAllMethods.size()> configs_;
};

}  // namespace pitchlab
