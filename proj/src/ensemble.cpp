#include "pitchlab/ensemble.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pitchlab/error.hpp"

namespace pitchlab {
namespace {

using nlohmann::json;

EstimatorConfig config_from_json(const json& j, EstimatorConfig base) {
  if (!j.is_object()) throw Error(Errc::invalid_config, "method config must be an object");
  if (j.contains("f_min")) base.f_min = j.at("f_min").get<double>();
  if (j.contains("f_max")) base.f_max = j.at("f_max").get<double>();
  if (j.contains("n_harmonics")) base.n_harmonics = j.at("n_harmonics").get<int>();
  return base;
}

Method method_or_throw(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw Error(Errc::unknown_method, "unknown method '" + name + "'");
  return *m;
}

}  // namespace

void EnsembleSpec::validate() const {
  if (member_count() < 2) throw Error(Errc::invalid_config, "an ensemble needs at least two members");
  std::set<std::string> names;
  for (const auto& m : members) {
    if (!names.insert(std::string(method_name(m.method))).second) {
      throw Error(Errc::invalid_config, "duplicate ensemble member '" + std::string(method_name(m.method)) + "'");
    }
  }
  if (external) {
    external->validate();
    if (!names.insert(external->name).second) {
      throw Error(Errc::invalid_config, "external member name '" + external->name + "' clashes with a method");
    }
  }
  if (quorum < 1) throw Error(Errc::invalid_config, "quorum must be at least 1");
}

EnsembleSpec EnsembleSpec::defaults(int sample_rate) {
  EnsembleSpec spec;
  for (Method m : {Method::hps, Method::stft, Method::ml, Method::srh}) {
    spec.members.push_back({m, default_config(m, sample_rate)});
  }
  return spec;
}

std::optional<double> fuse_votes(std::span<const std::optional<double>> votes, std::size_t quorum) {
  std::vector<double> v;
  for (const auto& x : votes) {
    if (x) v.push_back(*x);
  }
  if (v.size() < quorum) return std::nullopt;
  return median(std::move(v));
}

PitchEstimate ensemble_estimate(std::span<const double> note, int sample_rate, const EnsembleSpec& spec,
                                const AnalysisParams& params) {
  spec.validate();
  std::future<PitchEstimate> external;
  if (spec.external) {
    external = std::async(std::launch::async, [&] { return run_external(*spec.external, note, sample_rate); });
  }
  PitchEstimate out = PitchEstimate::unvoiced("ensemble");
  out.per_frame.reserve(spec.member_count());
  for (const auto& m : spec.members) {
    out.per_frame.push_back(estimate_note(m.method, note, sample_rate, m.config, params).f0);
  }
  if (external.valid()) out.per_frame.push_back(external.get().f0);
  out.f0 = fuse_votes(out.per_frame, spec.quorum);
  return out;
}

EnsembleSpec parse_ensemble_spec(std::string_view json_text, int sample_rate) {
  EnsembleSpec spec;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw Error(Errc::invalid_config, "ensemble spec must be a JSON object");
    if (j.contains("members")) {
      for (const auto& entry : j.at("members")) {
        if (entry.is_string()) {
          const Method m = method_or_throw(entry.get<std::string>());
          spec.members.push_back({m, default_config(m, sample_rate)});
        } else {
          const Method m = method_or_throw(entry.at("name").get<std::string>());
          spec.members.push_back({m, config_from_json(entry, default_config(m, sample_rate))});
        }
      }
    } else {
      spec = EnsembleSpec::defaults(sample_rate);
    }
    if (j.contains("external") && !j.at("external").is_null()) {
      const json& e = j.at("external");
      ExternalEstimator ext;
      ext.command = e.value("command", std::string());
      ext.timeout_s = e.value("timeout", ext.timeout_s);
      ext.f_min = e.value("f_min", ext.f_min);
      ext.f_max = e.value("f_max", ext.f_max);
      ext.name = e.value("name", ext.name);
      spec.external = ext;
    }
    spec.quorum = j.value("quorum", spec.quorum);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, std::string("ensemble spec: ") + e.what());
  }
  apply_external_override(spec);
  spec.validate();
  return spec;
}

EnsembleSpec load_ensemble_spec(const std::filesystem::path& path, int sample_rate) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open ensemble spec " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ensemble_spec(ss.str(), sample_rate);
}

void apply_external_override(EnsembleSpec& spec) {
  const char* env = std::getenv(kExternalEnvVar);
  if (env == nullptr || *env == '\0') return;
  if (!spec.external) spec.external = ExternalEstimator{};
  spec.external->command = env;
}

}  // namespace pitchlab
