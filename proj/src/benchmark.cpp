#include "pitchlab/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pitchlab/error.hpp"
#include "pitchlab/evaluation.hpp"
#include "pitchlab/log.hpp"
#include "pitchlab/synth.hpp"
#include "pitchlab/wav.hpp"

namespace pitchlab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string format_snr(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// A requested report row: a registry method or the ensemble.
struct Column {
  std::string name;
  std::optional<Method> method;
};

std::vector<Column> resolve_columns(const std::vector<std::string>& names) {
  std::vector<Column> out;
  for (const auto& name : names) {
    if (name == kEnsembleName) {
      out.push_back({name, std::nullopt});
    } else if (const auto m = parse_method(name)) {
      out.push_back({name, m});
    } else {
      throw Error(Errc::unknown_method, "unknown method '" + name + "'");
    }
  }
  if (out.empty()) throw Error(Errc::invalid_config, "no methods selected");
  return out;
}

// Per-note memo of estimates keyed by (method, config).
class NoteCache {
 public:
  NoteCache(std::span<const double> note, int sample_rate, const AnalysisParams& params)
      : note_(note), sample_rate_(sample_rate), params_(params) {}

  std::optional<double> get(Method method, const EstimatorConfig& cfg) {
    for (const auto& e : entries_) {
      if (e.method == method && e.cfg == cfg) return e.f0;
    }
    const auto f0 = estimate_note(method, note_, sample_rate_, cfg, params_).f0;
    entries_.push_back({method, cfg, f0});
    return f0;
  }

 private:
  struct Entry {
    Method method;
    EstimatorConfig cfg;
    std::optional<double> f0;
  };
  std::span<const double> note_;
  int sample_rate_;
  const AnalysisParams& params_;
  std::vector<Entry> entries_;
};

// One (song, condition) work item. condition < 0 is the clean audio.
struct Item {
  std::size_t song;
  int condition;
};

struct ItemResult {
  std::vector<double> errors;  // per column
  bool failed = false;
};

ItemResult evaluate_item(const Song& song, const AudioBuffer& audio, const std::vector<Column>& columns,
                         const BenchmarkOptions& options) {
  const int fs = audio.sample_rate();
  const MethodConfigs configs = options.configs.value_or(MethodConfigs(fs));
  const EnsembleSpec spec = options.ensemble.value_or(EnsembleSpec::defaults(fs));

  std::vector<std::vector<std::optional<double>>> estimates(columns.size());
  std::vector<double> truths;
  for (const auto& note : song.notes) {
    if (!note.f0_truth) continue;
    truths.push_back(*note.f0_truth);
    const auto samples = audio.slice_seconds(note.onset, note.offset);
    NoteCache cache(samples, fs, options.params);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].method) {
        estimates[c].push_back(cache.get(*columns[c].method, configs.get(*columns[c].method)));
        continue;
      }
      std::vector<std::optional<double>> votes;
      for (const auto& m : spec.members) votes.push_back(cache.get(m.method, m.config));
      if (spec.external) votes.push_back(run_external(*spec.external, samples, fs).f0);
      estimates[c].push_back(fuse_votes(votes, spec.quorum));
    }
  }
  ItemResult r;
  r.errors.assign(columns.size(), kNaN);
  if (truths.empty()) return r;
  for (std::size_t c = 0; c < columns.size(); ++c) r.errors[c] = pitch_error(estimates[c], truths);
  return r;
}

}  // namespace

std::vector<std::string> default_benchmark_methods() {
  std::vector<std::string> out;
  for (Method m : kAllMethods) out.emplace_back(method_name(m));
  out.emplace_back(kEnsembleName);
  return out;
}

std::vector<Song> load_song_dir(const std::filesystem::path& dir, std::size_t* failed) {
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::io_error, "songs directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> wavs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") wavs.push_back(entry.path());
  }
  std::sort(wavs.begin(), wavs.end());
  std::vector<Song> songs;
  std::size_t bad = 0;
  for (const auto& wav : wavs) {
    auto notes_path = wav;
    notes_path.replace_extension(".txt");
    try {
      Song s;
      s.id = wav.stem().string();
      s.audio = read_wav(wav);
      s.notes = load_annotation(notes_path);
      songs.push_back(std::move(s));
    } catch (const Error& e) {
      log::warn("skipping song " + wav.filename().string() + ": " + e.what());
      ++bad;
    }
  }
  if (failed) *failed = bad;
  return songs;
}

std::vector<Song> synthetic_songs(std::size_t count, std::uint64_t seed, int sample_rate) {
  std::vector<Song> out;
  SongSynthParams p;
  p.sample_rate = sample_rate;
  for (std::size_t i = 0; i < count; ++i) {
    auto s = synth_song(seed + i, p);
    out.push_back(Song{"synth_" + std::to_string(i + 1), std::move(s.audio), std::move(s.notes)});
  }
  return out;
}

double ErrorReport::cell(std::size_t method, std::size_t noise, std::size_t snr) const {
  return noisy.at(method).at(noise * snrs.size() + snr);
}

double ErrorReport::noise_average(std::size_t method, std::size_t noise) const {
  std::vector<double> v;
  for (std::size_t s = 0; s < snrs.size(); ++s) v.push_back(cell(method, noise, s));
  return mean_of(v);
}

double ErrorReport::noisy_average(std::size_t method) const {
  std::vector<double> v;
  for (std::size_t n = 0; n < noises.size(); ++n) v.push_back(noise_average(method, n));
  return mean_of(v);
}

ErrorReport run_benchmark(const std::vector<Song>& songs, const BenchmarkOptions& options) {
  const auto columns = resolve_columns(options.methods);
  if (options.ensemble) options.ensemble->validate();

  std::vector<Item> items;
  const int conditions = static_cast<int>(options.noises.size() * options.snrs.size());
  for (std::size_t s = 0; s < songs.size(); ++s) {
    if (options.include_clean) items.push_back({s, -1});
    for (int c = 0; c < conditions; ++c) items.push_back({s, c});
  }

  std::vector<ItemResult> results(items.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const Item& item = items[i];
      const Song& song = songs[item.song];
      try {
        if (item.condition < 0) {
          results[i] = evaluate_item(song, song.audio, columns, options);
        } else {
          const auto& noise = options.noises[static_cast<std::size_t>(item.condition) / options.snrs.size()];
          const double snr = options.snrs[static_cast<std::size_t>(item.condition) % options.snrs.size()];
          const MixResult mix = mix_at_snr(song.audio, noise, snr);
          results[i] = evaluate_item(song, mix.mixed, columns, options);
        }
      } catch (const std::exception& e) {
        log::warn("song " + song.id + ": " + e.what());
        results[i].failed = true;
      }
    }
  };
  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<bool> song_failed(songs.size(), false);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (results[i].failed) song_failed[items[i].song] = true;
  }

  ErrorReport report;
  for (const auto& c : columns) report.methods.push_back(c.name);
  for (const auto& n : options.noises) report.noises.push_back({n.id, n.name});
  report.snrs = options.snrs;
  report.songs_total = songs.size();
  report.songs_failed = static_cast<std::size_t>(std::count(song_failed.begin(), song_failed.end(), true));

  // Deterministic reduction: items are in (song, condition) order.
  const auto reduce = [&](std::size_t col, int condition) {
    std::vector<double> v;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].condition != condition || song_failed[items[i].song]) continue;
      const double e = results[i].errors[col];
      if (!std::isnan(e)) v.push_back(e);
    }
    return mean_of(v);
  };
  report.noisy.assign(columns.size(), std::vector<double>(static_cast<std::size_t>(conditions), kNaN));
  if (options.include_clean) report.clean.assign(columns.size(), kNaN);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (options.include_clean) report.clean[c] = reduce(c, -1);
    for (int k = 0; k < conditions; ++k) report.noisy[c][static_cast<std::size_t>(k)] = reduce(c, k);
  }
  return report;
}

std::string render_report(const ErrorReport& report, ReportFormat format) {
  if (report.empty()) throw Error(Errc::invalid_config, "cannot render an empty report");
  const bool noisy = !report.noises.empty() && !report.snrs.empty();
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << "method";
    if (noisy) {
      for (const auto& n : report.noises) out << ",noise_" << n.id;
    }
    if (report.has_clean()) out << ",clean";
    if (noisy) out << ",noisy_avg";
    out << '\n';
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      out << report.methods[m];
      if (noisy) {
        for (std::size_t n = 0; n < report.noises.size(); ++n) out << ',' << format_number(report.noise_average(m, n), 6);
      }
      if (report.has_clean()) out << ',' << format_number(report.clean[m], 6);
      if (noisy) out << ',' << format_number(report.noisy_average(m), 6);
      out << '\n';
    }
    return out.str();
  }

  std::size_t width = 12;
  for (const auto& m : report.methods) width = std::max(width, m.size() + 2);
  const auto pad = [&](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 1, ' '); };
  if (noisy) {
    out << "Pitch errors per noise, averaged over SNR {";
    for (std::size_t s = 0; s < report.snrs.size(); ++s) out << (s ? ", " : "") << format_snr(report.snrs[s]);
    out << "} dB\n";
    out << pad("Method \\ Noise", std::max<std::size_t>(width, 16));
    for (const auto& n : report.noises) out << pad(std::to_string(n.id), 9);
    out << '\n';
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      out << pad(report.methods[m], std::max<std::size_t>(width, 16));
      for (std::size_t n = 0; n < report.noises.size(); ++n) out << pad(format_number(report.noise_average(m, n), 2), 9);
      out << '\n';
    }
    out << "Noises:";
    for (const auto& n : report.noises) out << ' ' << n.id << '=' << (n.name.empty() ? "?" : n.name);
    out << "\n\n";
  }
  out << "Summary\n" << pad("", 20);
  for (const auto& m : report.methods) out << pad(m, width);
  out << '\n';
  if (report.has_clean()) {
    out << pad("Clean audio error", 20);
    for (std::size_t m = 0; m < report.methods.size(); ++m) out << pad(format_number(report.clean[m], 2), width);
    out << '\n';
  }
  if (noisy) {
    out << pad("Noisy audio error", 20);
    for (std::size_t m = 0; m < report.methods.size(); ++m) out << pad(format_number(report.noisy_average(m), 2), width);
    out << '\n';
  }
  if (report.songs_total > 0) {
    out << "Songs: " << report.songs_total - report.songs_failed << " scored, " << report.songs_failed << " failed\n";
  }
  return out.str();
}

std::string render_long_csv(const ErrorReport& report) {
  std::ostringstream out;
  out << "method,noise_id,snr_db,error\n";
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    if (report.has_clean()) out << report.methods[m] << ",clean,," << format_number(report.clean[m], 6) << '\n';
    for (std::size_t n = 0; n < report.noises.size(); ++n) {
      for (std::size_t s = 0; s < report.snrs.size(); ++s) {
        out << report.methods[m] << ',' << report.noises[n].id << ',' << format_snr(report.snrs[s]) << ','
            << format_number(report.cell(m, n, s), 6) << '\n';
      }
    }
  }
  return out.str();
}

ErrorReport parse_long_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("method,noise_id,snr_db,error", 0) != 0) {
    throw Error(Errc::invalid_config, "not a long-form results CSV");
  }
  struct Row {
    std::string method;
    std::optional<int> noise;
    double snr = 0.0;
    double error = kNaN;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() == 3) f.emplace_back();
    if (f.size() != 4) throw Error(Errc::invalid_config, "CSV line " + std::to_string(line_no) + ": expected 4 fields");
    Row r;
    r.method = f[0];
    try {
      if (f[1] != "clean") {
        r.noise = std::stoi(f[1]);
        r.snr = std::stod(f[2]);
      }
      r.error = f[3] == "nan" ? kNaN : std::stod(f[3]);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_config, "CSV line " + std::to_string(line_no) + ": bad number");
    }
    rows.push_back(std::move(r));
  }

  ErrorReport report;
  const auto index_of = [](auto& vec, const auto& value) {
    const auto it = std::find(vec.begin(), vec.end(), value);
    if (it != vec.end()) return static_cast<std::size_t>(it - vec.begin());
    vec.push_back(value);
    return vec.size() - 1;
  };
  std::vector<int> noise_ids;
  bool any_clean = false;
  for (const auto& r : rows) {
    index_of(report.methods, r.method);
    if (r.noise) {
      index_of(noise_ids, *r.noise);
      index_of(report.snrs, r.snr);
    } else {
      any_clean = true;
    }
  }
  for (int id : noise_ids) report.noises.push_back({id, ""});
  const std::size_t cells = noise_ids.size() * report.snrs.size();
  report.noisy.assign(report.methods.size(), std::vector<double>(cells, kNaN));
  if (any_clean) report.clean.assign(report.methods.size(), kNaN);
  for (const auto& r : rows) {
    const std::size_t m = index_of(report.methods, r.method);
    if (r.noise) {
      const std::size_t n = index_of(noise_ids, *r.noise);
      const std::size_t s = index_of(report.snrs, r.snr);
      report.noisy[m][n * report.snrs.size() + s] = r.error;
    } else {
      report.clean[m] = r.error;
    }
  }
  return report;
}

BenchmarkConfig parse_benchmark_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  using nlohmann::json;
  BenchmarkConfig cfg;
  const auto path_of = [&](const json& j) {
    std::filesystem::path p = j.get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw Error(Errc::invalid_config, "benchmark config must be a JSON object");
    if (j.contains("songs_dir")) cfg.songs_dir = path_of(j.at("songs_dir"));
    cfg.synthetic_songs = j.value("synthetic_songs", cfg.synthetic_songs);
    if (j.contains("noise_dir")) cfg.noise_dir = path_of(j.at("noise_dir"));
    if (j.contains("synthetic_noises")) {
      cfg.synthetic_noises.clear();
      for (const auto& n : j.at("synthetic_noises")) {
        const auto kind = parse_noise_kind(n.get<std::string>());
        if (!kind) throw Error(Errc::invalid_config, "unknown synthetic noise '" + n.get<std::string>() + "'");
        cfg.synthetic_noises.push_back(*kind);
      }
    }
    cfg.noise_length_s = j.value("noise_length_s", cfg.noise_length_s);
    if (j.contains("snrs")) cfg.snrs = j.at("snrs").get<std::vector<double>>();
    if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
    cfg.include_clean = j.value("include_clean", cfg.include_clean);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("ensemble_spec")) cfg.ensemble_spec = path_of(j.at("ensemble_spec"));
    if (j.contains("method_configs")) cfg.method_configs = path_of(j.at("method_configs"));
    if (j.contains("out_dir")) cfg.out_dir = path_of(j.at("out_dir"));
    cfg.sample_rate = j.value("sample_rate", cfg.sample_rate);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, std::string("benchmark config: ") + e.what());
  }
  if (cfg.methods.empty()) cfg.methods = default_benchmark_methods();
  if (cfg.sample_rate <= 0) throw Error(Errc::invalid_config, "sample_rate must be positive");
  if (!(cfg.noise_length_s > 0.0)) throw Error(Errc::invalid_config, "noise_length_s must be positive");
  return cfg;
}

BenchmarkConfig load_benchmark_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open benchmark config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_benchmark_config(ss.str(), path.parent_path());
}

}  // namespace pitchlab
