#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "pitchlab/annotation.hpp"
#include "pitchlab/benchmark.hpp"
#include "pitchlab/cli.hpp"
#include "pitchlab/ensemble.hpp"
#include "pitchlab/error.hpp"
#include "pitchlab/evaluation.hpp"
#include "pitchlab/method_config.hpp"
#include "pitchlab/noise.hpp"
#include "pitchlab/synth.hpp"
#include "pitchlab/wav.hpp"

namespace pitchlab::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

bool known_method(const std::string& name) { return name == kEnsembleName || parse_method(name).has_value(); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << text;
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

double parse_snr(const std::string& text) {
  std::size_t used = 0;
  const double v = std::stod(text, &used);  // accepts a leading '+'
  if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("bad SNR '" + text + "'");
  return v;
}

int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err, double* wall_time_s) {
  if (!known_method(options.method)) {
    err << "error: unknown method '" << options.method << "'\n";
    return kExitUsage;
  }

  AudioBuffer audio;
  std::vector<NoteSegment> notes;
  try {
    audio = read_wav(options.audio);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  try {
    notes = load_annotation(options.annotation);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::invalid_annotation ? kExitBadAnnotation : kExitBadInput;
  }

  const int fs = audio.sample_rate();
  MethodConfigs configs(fs);
  EnsembleSpec spec = EnsembleSpec::defaults(fs);
  try {
    if (options.method_configs) configs.apply_overrides_file(*options.method_configs);
    if (options.ensemble_spec) {
      spec = load_ensemble_spec(*options.ensemble_spec, fs);
    } else {
      for (auto& m : spec.members) m.config = configs.get(m.method);
      apply_external_override(spec);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  std::vector<std::optional<double>> f0s;
  f0s.reserve(notes.size());
  const auto start = Clock::now();
  try {
    for (const auto& note : notes) {
      const auto samples = audio.slice_seconds(note.onset, note.offset);
      if (options.method == kEnsembleName) {
        f0s.push_back(ensemble_estimate(samples, fs, spec).f0);
      } else {
        const Method m = *parse_method(options.method);
        f0s.push_back(estimate_note(m, samples, fs, configs.get(m)).f0);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (wall_time_s) *wall_time_s = elapsed;

  std::ostringstream lines;
  for (std::size_t i = 0; i < notes.size(); ++i) {
    lines << fixed(notes[i].onset, 6) << ' ' << fixed(notes[i].offset, 6) << ' ';
    if (f0s[i]) {
      lines << fixed(*f0s[i], 3) << ' ' << fixed(hz_to_midi(*f0s[i]), 3) << '\n';
    } else {
      lines << "unvoiced unvoiced\n";
    }
  }
  out << lines.str();
  err << "wall_time_s=" << fixed(elapsed, 4) << " notes=" << notes.size() << " method=" << options.method
      << " audio_s=" << fixed(audio.duration(), 2) << '\n';
  return kExitOk;
}

int cmd_mix(const MixOptions& options, std::ostream& out, std::ostream& err) {
  double snr = 0.0;
  try {
    snr = parse_snr(options.snr_db);
  } catch (const std::exception&) {
    err << "error: invalid SNR '" << options.snr_db << "'\n";
    return kExitUsage;
  }
  try {
    const AudioBuffer song = read_wav(options.song);
    NoiseSource noise;
    constexpr std::string_view kSynth = "synth:";
    if (options.noise.rfind(kSynth, 0) == 0) {
      const auto kind = parse_noise_kind(std::string_view(options.noise).substr(kSynth.size()));
      if (!kind) {
        err << "error: unknown synthetic noise '" << options.noise << "'\n";
        return kExitUsage;
      }
      noise = synth_noise(*kind, song.size(), song.sample_rate(), options.seed);
    } else {
      noise.name = std::filesystem::path(options.noise).stem().string();
      noise.buffer = read_wav(options.noise);
      noise.origin = NoiseOrigin::ingested_file;
    }
    const MixResult mix = mix_at_snr(song, noise, snr);
    write_wav_float(options.out, mix.mixed);
    out << "achieved_snr_db=" << fixed(mix.achieved_snr_db, 4) << " gain=" << fixed(mix.gain, 6)
        << " clipped=" << mix.clipped_samples << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  BenchmarkConfig cfg;
  try {
    cfg = load_benchmark_config(options.config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (options.seed) cfg.seed = *options.seed;
  if (options.noise_dir) cfg.noise_dir = *options.noise_dir;
  if (options.methods) cfg.methods = split_csv_list(*options.methods);
  for (const auto& m : cfg.methods) {
    if (!known_method(m)) {
      err << "error: unknown method '" << m << "'\n";
      return kExitUsage;
    }
  }
  const std::filesystem::path out_dir = options.out_dir.value_or(cfg.out_dir.value_or("bench_out"));

  const auto start = Clock::now();
  BenchmarkOptions bench;
  std::vector<Song> songs;
  std::size_t load_failures = 0;
  try {
    songs = cfg.songs_dir ? load_song_dir(*cfg.songs_dir, &load_failures)
                          : synthetic_songs(cfg.synthetic_songs, cfg.seed, cfg.sample_rate);
    const int fs = songs.empty() ? cfg.sample_rate : songs.front().audio.sample_rate();
    if (cfg.noise_dir) {
      bench.noises = load_noise_corpus(*cfg.noise_dir);
    } else {
      const auto length = static_cast<std::size_t>(cfg.noise_length_s * fs);
      int id = 1;
      for (NoiseKind kind : cfg.synthetic_noises) {
        NoiseSource n = synth_noise(kind, length, fs, cfg.seed * 1000003ULL + static_cast<std::uint64_t>(id));
        n.id = id++;
        bench.noises.push_back(std::move(n));
      }
    }
    bench.methods = cfg.methods;
    bench.snrs = cfg.snrs;
    bench.include_clean = cfg.include_clean;
    bench.jobs = options.jobs;
    MethodConfigs configs(fs);
    if (cfg.method_configs) configs.apply_overrides_file(*cfg.method_configs);
    bench.configs = configs;
    EnsembleSpec spec = EnsembleSpec::defaults(fs);
    if (cfg.ensemble_spec) {
      spec = load_ensemble_spec(*cfg.ensemble_spec, fs);
    } else {
      for (auto& m : spec.members) m.config = configs.get(m.method);
      apply_external_override(spec);
    }
    bench.ensemble = spec;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  ErrorReport report;
  try {
    report = run_benchmark(songs, bench);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  report.songs_total += load_failures;
  report.songs_failed += load_failures;
  if (report.songs_total == report.songs_failed) {
    err << "error: no song could be scored\n";
    return kExitNoSongs;
  }

  const std::string text = render_report(report, ReportFormat::text);
  try {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "results.csv", render_long_csv(report));
    write_text(out_dir / "table.csv", render_report(report, ReportFormat::csv));
    write_text(out_dir / "table.txt", text);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  out << text;
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  err << "wall_time_s=" << fixed(elapsed, 2) << " songs=" << report.songs_total << " jobs=" << options.jobs
      << " out=" << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
  if (options.format != "text" && options.format != "csv") {
    err << "error: format must be 'text' or 'csv'\n";
    return kExitUsage;
  }
  std::ifstream in(options.csv, std::ios::binary);
  if (!in) {
    err << "error: cannot open " << options.csv.string() << '\n';
    return kExitBadInput;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const ErrorReport report = parse_long_csv(ss.str());
    out << render_report(report, options.format == "csv" ? ReportFormat::csv : ReportFormat::text);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err) {
  SongSynthParams params;
  params.target_duration_s = options.duration_s;
  try {
    const SyntheticSong song = synth_song(options.seed, params);
    write_wav_float(options.out_wav, song.audio);
    save_annotation(options.out_notes, song.notes);
    out << "notes=" << song.notes.size() << " duration_s=" << fixed(song.audio.duration(), 3) << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

}  // namespace pitchlab::cli
