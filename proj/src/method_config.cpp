#include "pitchlab/method_config.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pitchlab/error.hpp"

namespace pitchlab {

MethodConfigs::MethodConfigs(int sample_rate) {
  for (Method m : kAllMethods) set(m, default_config(m, sample_rate));
}

void MethodConfigs::apply_overrides(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, std::string("method configs: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::invalid_config, "method configs must be a JSON object");
  for (const auto& [name, body] : j.items()) {
    const auto method = parse_method(name);
    if (!method) throw Error(Errc::unknown_method, "unknown method '" + name + "'");
    EstimatorConfig cfg = get(*method);
    try {
      if (body.contains("f_min")) cfg.f_min = body.at("f_min").get<double>();
      if (body.contains("f_max")) cfg.f_max = body.at("f_max").get<double>();
      if (body.contains("n_harmonics")) cfg.n_harmonics = body.at("n_harmonics").get<int>();
    } catch (const json::exception& e) {
      throw Error(Errc::invalid_config, name + ": " + e.what());
    }
    if (!(cfg.f_min >= 0.0) || !(cfg.f_min < cfg.f_max) || cfg.n_harmonics < 1) {
      throw Error(Errc::invalid_config, name + ": need 0 <= f_min < f_max and n_harmonics >= 1");
    }
    set(*method, cfg);
  }
}

void MethodConfigs::apply_overrides_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open method config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_overrides(ss.str());
}

}  // namespace pitchlab
