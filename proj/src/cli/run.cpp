#include <iostream>

#include "CLI11.hpp"
#include "pitchlab/cli.hpp"
#include "pitchlab/log.hpp"

namespace pitchlab::cli {

int run(int argc, char** argv) {
  CLI::App app{"pitchlab: monophonic pitch estimation and noise benchmarking"};
  app.require_subcommand(1);
  int verbosity = 1;
  app.add_option("-v,--verbosity", verbosity, "0 quiet, 1 warnings, 2 info, 3 debug")->check(CLI::Range(0, 3));

  EstimateOptions est;
  std::string est_spec, est_configs;
  auto* estimate = app.add_subcommand("estimate", "Estimate the pitch of every annotated note");
  estimate->add_option("audio", est.audio, "WAV file")->required();
  estimate->add_option("annotation", est.annotation, "Note sidecar: onset offset [f0] per line")->required();
  estimate->add_option("--method", est.method, "Registry method or 'ensemble'");
  estimate->add_option("--ensemble-spec", est_spec, "Ensemble spec JSON");
  estimate->add_option("--method-config", est_configs, "Per-method config overrides JSON");

  MixOptions mix;
  auto* mixcmd = app.add_subcommand("mix", "Mix noise into a song at an exact SNR");
  mixcmd->add_option("song", mix.song, "Clean WAV")->required();
  mixcmd->add_option("noise", mix.noise, "Noise WAV or synth:<white|pink|hum50|babble>")->required();
  mixcmd->add_option("--snr", mix.snr_db, "Target SNR in dB")->required()->allow_extra_args(false);
  mixcmd->add_option("--out", mix.out, "Output WAV (32-bit float)")->required();
  mixcmd->add_option("--seed", mix.seed, "Seed for synthetic noise");

  BenchOptions bench;
  std::string bench_out, bench_noise, bench_methods;
  std::uint64_t bench_seed = 0;
  auto* benchcmd = app.add_subcommand("bench", "Run the noise x SNR benchmark");
  benchcmd->add_option("config", bench.config, "Benchmark config JSON")->required();
  benchcmd->add_option("--out", bench_out, "Output directory");
  auto* seed_opt = benchcmd->add_option("--seed", bench_seed, "Override the config seed");
  benchcmd->add_option("--noise-dir", bench_noise, "Noise corpus directory (NN_name.wav)");
  benchcmd->add_option("--method", bench_methods, "Comma-separated methods");
  benchcmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ReportOptions report;
  auto* reportcmd = app.add_subcommand("report", "Render tables from a results.csv");
  reportcmd->add_option("csv", report.csv, "Long-form results CSV")->required();
  reportcmd->add_option("--format", report.format, "text or csv");

  SynthOptions synth;
  auto* synthcmd = app.add_subcommand("synth", "Write a synthetic sawtooth melody and its annotation");
  synthcmd->add_option("wav", synth.out_wav, "Output WAV")->required();
  synthcmd->add_option("notes", synth.out_notes, "Output annotation")->required();
  synthcmd->add_option("--seed", synth.seed, "Melody seed");
  synthcmd->add_option("--duration", synth.duration_s, "Approximate length in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  log::set_level(static_cast<log::Level>(verbosity));

  if (*estimate) {
    if (!est_spec.empty()) est.ensemble_spec = est_spec;
    if (!est_configs.empty()) est.method_configs = est_configs;
    return cmd_estimate(est, std::cout, std::cerr);
  }
  if (*mixcmd) return cmd_mix(mix, std::cout, std::cerr);
  if (*benchcmd) {
    if (!bench_out.empty()) bench.out_dir = bench_out;
    if (*seed_opt) bench.seed = bench_seed;
    if (!bench_noise.empty()) bench.noise_dir = bench_noise;
    if (!bench_methods.empty()) bench.methods = bench_methods;
    return cmd_bench(bench, std::cout, std::cerr);
  }
  if (*reportcmd) return cmd_report(report, std::cout, std::cerr);
  if (*synthcmd) return cmd_synth(synth, std::cout, std::cerr);
  return kExitUsage;
}

}  // namespace pitchlab::cli
