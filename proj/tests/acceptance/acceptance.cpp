// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pitchlab/annotation.hpp"
#include "pitchlab/benchmark.hpp"
#include "pitchlab/cli.hpp"
#include "pitchlab/correlation.hpp"
#include "pitchlab/ensemble.hpp"
#include "pitchlab/estimators.hpp"
#include "pitchlab/evaluation.hpp"
#include "pitchlab/external.hpp"
#include "pitchlab/log.hpp"
#include "pitchlab/noise.hpp"
#include "pitchlab/synth.hpp"
#include "pitchlab/wav.hpp"

using namespace pitchlab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
constexpr int kFs = 44100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "pitchlab_acceptance";
  fs::create_directories(dir);
  return dir;
}

// 1. Quarter-tone accuracy on 50 seeded melodies.
Outcome clean_tone_accuracy() {
  const auto start = Clock::now();
  const std::vector<Method> methods{Method::hps, Method::stft, Method::ml,  Method::srh,
                                    Method::acf, Method::nsdf, Method::yin};
  std::vector<std::size_t> hits(methods.size() + 1, 0);
  std::size_t notes = 0;
  const auto spec = EnsembleSpec::defaults(kFs);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto song = synth_song(seed);
    for (const auto& n : song.notes) {
      const auto x = song.audio.slice_seconds(n.onset, n.offset);
      const double truth = *n.f0_truth;
      ++notes;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto e = estimate_note(methods[m], x, kFs);
        if (e.f0 && within_quarter_tone(*e.f0, truth)) ++hits[m];
      }
      const auto e = ensemble_estimate(x, kFs, spec);
      if (e.f0 && within_quarter_tone(*e.f0, truth)) ++hits.back();
    }
  }
  const double elapsed = seconds_since(start);
  bool pass = elapsed < 60.0;
  std::string detail = fmt("%zu notes;", notes);
  for (std::size_t m = 0; m <= methods.size(); ++m) {
    const double rate = static_cast<double>(hits[m]) / static_cast<double>(notes);
    const bool is_ensemble = m == methods.size();
    pass = pass && rate >= (is_ensemble ? 0.98 : 0.95);
    detail += fmt(" %s %.1f%%", is_ensemble ? "ensemble" : std::string(method_name(methods[m])).c_str(), 100.0 * rate);
  }
  return {pass, detail + fmt("; %.1f s", elapsed)};
}

// Runs the bundled synthetic benchmark through the CLI and returns the
// results.csv text.
std::string run_bundled_bench(unsigned jobs, const fs::path& out_dir, int* exit_code) {
  cli::BenchOptions opt;
  opt.config = fs::path(PITCHLAB_SOURCE_DIR) / "configs/synthetic_bench.json";
  opt.out_dir = out_dir;
  opt.jobs = jobs;
  std::ostringstream out, err;
  *exit_code = cli::cmd_bench(opt, out, err);
  return read_text(out_dir / "results.csv");
}

// 2. Ensemble error within 0.1 of every member, clean and noisy.
Outcome ensemble_trend(const std::string& csv) {
  const ErrorReport r = parse_long_csv(csv);
  const auto index_of = [&](const std::string& name) {
    const auto it = std::find(r.methods.begin(), r.methods.end(), name);
    return static_cast<std::size_t>(it - r.methods.begin());
  };
  const std::size_t ens = index_of(std::string(kEnsembleName));
  if (ens == r.methods.size() || !r.has_clean()) return {false, "ensemble or clean column missing"};
  bool pass = true;
  std::string detail = fmt("ensemble clean %.3f noisy %.3f; members", r.clean[ens], r.noisy_average(ens));
  for (const char* member : {"hps", "stft", "ml", "srh"}) {
    const std::size_t m = index_of(member);
    if (m == r.methods.size()) return {false, std::string("member missing: ") + member};
    const bool clean_ok = r.clean[ens] <= r.clean[m] + 0.1;
    const bool noisy_ok = r.noisy_average(ens) <= r.noisy_average(m) + 0.1;
    pass = pass && clean_ok && noisy_ok;
    detail += fmt(" %s %.3f/%.3f%s", member, r.clean[m], r.noisy_average(m),
                  clean_ok && noisy_ok ? "" : (clean_ok ? " (noisy exceeded)" : " (clean exceeded)"));
  }
  return {pass, detail + " (clean/noisy)"};
}

// 3. SNR exactness of the mixer.
Outcome snr_exactness() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(1000, 30000);
  std::uniform_real_distribution<double> amp(1e-3, 1.0);
  const auto random_vec = [&](std::size_t n, double a) {
    std::uniform_real_distribution<double> d(-a, a);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
  };
  double worst = 0.0;
  std::size_t trials = 0;
  for (double snr : kDefaultSnrs) {
    for (int t = 0; t < 100; ++t) {
      const auto s = random_vec(len(rng), amp(rng));
      NoiseSource noise;
      noise.name = "random";
      noise.buffer = AudioBuffer(random_vec(len(rng), amp(rng)), kFs);
      const auto mix = mix_at_snr(AudioBuffer(s, kFs), noise, snr);
      double ps = 0.0, pn = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        ps += s[i] * s[i];
        const double added = mix.mixed.samples()[i] - s[i];
        pn += added * added;
      }
      worst = std::max(worst, std::abs(10.0 * std::log10(ps / pn) - snr));
      ++trials;
    }
  }
  return {worst <= 0.01, fmt("%zu round trips, worst deviation %.2e dB", trials, worst)};
}

// 4. Default grid size.
Outcome scenario_count() {
  std::vector<int> ids;
  for (std::size_t i = 0; i < kCorpusNoiseNames.size(); ++i) ids.push_back(static_cast<int>(i + 1));
  const auto grid = scenario_grid(ids, kDefaultSnrs);
  return {grid.size() == 68, fmt("%zu noises x %zu SNRs -> %zu scenarios", ids.size(), kDefaultSnrs.size(), grid.size())};
}

// 5. Pitch error against a straight-line reimplementation.
Outcome metric_oracle() {
  bool examples = pitch_error(std::vector<double>{261.63, 440.0}, std::vector<double>{261.63, 440.0}) == 0.0 &&
                  pitch_error(std::vector<double>{444.0}, std::vector<double>{440.0}) == 2.0 &&
                  pitch_error(std::vector<double>{201.0, 309.0}, std::vector<double>{200.0, 300.0}) == 2.0;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> count(1, 50);
  std::uniform_real_distribution<double> hz(20.0, 4000.0);
  std::bernoulli_distribution unvoiced(0.1);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = count(rng);
    std::vector<std::optional<double>> est;
    std::vector<double> truth;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      truth.push_back(hz(rng));
      const double f = unvoiced(rng) ? 0.0 : hz(rng);
      est.push_back(f > 0.0 ? std::optional<double>(f) : std::nullopt);
      sum += std::sqrt(std::fabs(f - truth.back()));
    }
    const double expected = sum / n;
    worst = std::max(worst, std::abs(pitch_error(est, truth) - expected) / expected);
  }
  return {examples && worst <= 1e-12,
          fmt("worked examples %s; 1000 random pairs, worst relative error %.1e", examples ? "exact" : "WRONG", worst)};
}

// 6. Brute-force equivalences for the ACF, ML comb and SRH.
Outcome brute_force() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double acf_worst = 0.0;
  for (std::size_t n : {2u, 31u, 64u, 128u, 200u, 256u}) {
    for (int t = 0; t < 10; ++t) {
      std::vector<double> x(n);
      for (double& v : x) v = u(rng);
      const auto r = autocorrelation(x, n - 1);
      double r0 = 0.0;
      for (double v : x) r0 += v * v;
      for (std::size_t tau = 0; tau < n; ++tau) {
        double direct = 0.0;
        for (std::size_t i = 0; i + tau < n; ++i) direct += x[i] * x[i + tau];
        acf_worst = std::max(acf_worst, std::abs(r.values[tau] - direct) / r0);
      }
    }
  }

  const auto bin_at = [](const Spectrum& s, double bin) {
    const auto i = static_cast<std::size_t>(std::lround(bin));
    return i < s.size() ? s.magnitudes[i] : 0.0;
  };
  const auto spikes = [](std::initializer_list<double> hz) {
    Spectrum s;
    s.magnitudes.assign(1025, 0.0);
    s.bin_hz = 10.0;
    for (double f : hz) s.magnitudes[static_cast<std::size_t>(std::lround(f / 10.0))] = 1.0;
    return s;
  };

  // ML comb: argmax equals exhaustive scoring of every grid candidate.
  bool ml_ok = true;
  std::uniform_int_distribution<std::size_t> bin(1, 1024);
  for (int t = 0; t < 200; ++t) {
    Spectrum s = spikes({});
    for (int p = 0; p < 12; ++p) s.magnitudes[bin(rng)] = 0.1 + 0.9 * std::abs(u(rng));
    const EstimatorConfig cfg = default_config(Method::ml, kFs);
    const auto grid = bin_grid(s, cfg, s.size() - 1);
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double score = 0.0;
      for (int h = 1; h <= cfg.n_harmonics; ++h) score += bin_at(s, static_cast<double>(h * grid.index[i]));
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    ml_ok = ml_ok && argmax_lowest(ml_comb_scores(s, grid, cfg.n_harmonics)) == best;
  }
  {
    const Spectrum s = spikes({300, 600, 900});
    const auto grid = bin_grid(s, default_config(Method::ml, kFs), s.size() - 1);
    ml_ok = ml_ok && grid.candidates[argmax_lowest(ml_comb_scores(s, grid, 5))] == 300.0;
  }

  // SRH by direct evaluation at f = 200 Hz (bin 20).
  const auto srh_direct = [&](const Spectrum& s, std::size_t b) {
    double v = bin_at(s, static_cast<double>(b));
    for (int k = 2; k <= 5; ++k) v += bin_at(s, k * static_cast<double>(b)) - bin_at(s, (k - 0.5) * b);
    return v;
  };
  const auto srh_at = [&](const Spectrum& s, double hz) {
    CandidateGrid g;
    g.candidates = {hz};
    g.index = {static_cast<std::size_t>(std::lround(hz / s.bin_hz))};
    return srh_scores(s, g, 5).front();
  };
  const Spectrum five = spikes({200, 400, 600, 800, 1000});
  const Spectrum penalty = spikes({200, 300, 400, 500, 600, 800, 1000});
  const double srh5 = srh_at(five, 200.0);
  const double srh3 = srh_at(penalty, 200.0);
  const bool srh_ok = srh5 == 5.0 && srh_direct(five, 20) == 5.0 && srh3 == 3.0 && srh_direct(penalty, 20) == 3.0;

  return {acf_worst <= 1e-9 && ml_ok && srh_ok,
          fmt("ACF worst relative %.1e; ML comb argmax %s; SRH five-peak %.0f, penalty %.0f", acf_worst,
              ml_ok ? "matches exhaustive" : "MISMATCH", srh5, srh3)};
}

// 7. Median robustness to a corrupted minority.
Outcome median_robustness() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> half(1, 5);
  std::uniform_real_distribution<double> inlier(100.0, 1000.0);
  std::uniform_real_distribution<double> wild(-1e9, 1e9);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 * static_cast<std::size_t>(half(rng)) + (trial % 2);
    std::vector<double> votes(m);
    for (double& v : votes) v = inlier(rng);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t bad = (m - 1) / 2;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = bad; i < m; ++i) {
      lo = std::min(lo, votes[order[i]]);
      hi = std::max(hi, votes[order[i]]);
    }
    for (std::size_t i = 0; i < bad; ++i) votes[order[i]] = wild(rng);
    const std::vector<std::optional<double>> v(votes.begin(), votes.end());
    const auto f = fuse_votes(v);
    if (!f || *f < lo || *f > hi) ++failures;
  }
  return {failures == 0, fmt("1000 trials, %zu outside the inlier envelope", failures)};
}

// 8. Wall time of the ensemble on a 15 s song, by the CLI's timer.
Outcome latency() {
  const auto dir = scratch_dir();
  SongSynthParams p;
  p.target_duration_s = 15.0;
  const auto song = synth_song(8, p);
  write_wav_float(dir / "latency.wav", song.audio);
  save_annotation(dir / "latency.txt", song.notes);
  cli::EstimateOptions opt;
  opt.audio = dir / "latency.wav";
  opt.annotation = dir / "latency.txt";
  opt.method = std::string(kEnsembleName);
  std::ostringstream out, err;
  double wall = 0.0;
  const int code = cli::cmd_estimate(opt, out, err, &wall);
  return {code == cli::kExitOk && wall <= 2.0,
          fmt("%.2f s song, %zu notes, 4 members, %.3f s", song.audio.duration(), song.notes.size(), wall)};
}

// 9. External protocol paths through the stub estimator.
Outcome external_protocol() {
  const auto stub = [](const std::string& args, double timeout = 5.0) {
    ExternalEstimator e;
    e.command = std::string("'") + PITCHLAB_STUB + "' " + args;
    e.timeout_s = timeout;
    return e;
  };
  const auto note = sawtooth(220.0, kFs / 2, kFs, 0.4);
  const auto reply = run_external(stub("reply 'F0 440'"), note, kFs);
  const auto start = Clock::now();
  const auto slow = run_external(stub("sleep 30", 1.0), note, kFs);
  const double slow_s = seconds_since(start);
  const auto range = run_external(stub("reply 'F0 9000'"), note, kFs);
  const bool paths = reply.f0 == 440.0 && !slow.f0 && slow_s < 5.0 && !range.f0;

  const auto base = EnsembleSpec::defaults(kFs);
  auto with = base;
  with.external = stub("reply UNVOICED");
  bool equal = true;
  std::size_t notes = 0;
  const auto song = synth_song(9);
  for (const auto& n : song.notes) {
    const auto x = song.audio.slice_seconds(n.onset, n.offset);
    equal = equal && ensemble_estimate(x, kFs, base).f0 == ensemble_estimate(x, kFs, with).f0;
    ++notes;
  }
  return {paths && equal,
          fmt("reply %s, timeout %s after %.2f s, out-of-range %s; unvoiced external %s on %zu notes",
              reply.f0 ? fmt("%.0f Hz", *reply.f0).c_str() : "unvoiced", slow.f0 ? "voiced" : "unvoiced", slow_s,
              range.f0 ? "voiced" : "unvoiced", equal ? "identical" : "DIFFERENT", notes)};
}

// 10. Byte-identical results across runs and worker counts.
Outcome determinism(const std::string& first_csv, int first_code) {
  int code = 0;
  const std::string second = run_bundled_bench(8, scratch_dir() / "bench_jobs8", &code);
  const bool pass = first_code == cli::kExitOk && code == cli::kExitOk && !first_csv.empty() && first_csv == second;
  return {pass, fmt("jobs 1 vs 8: %zu vs %zu bytes, %s", first_csv.size(), second.size(),
                    first_csv == second ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  ::unsetenv(kExternalEnvVar);
  log::set_level(log::Level::quiet);

  int failed = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  };

  int bench_code = 0;
  std::string bench_csv;
  report(1, "clean-tone accuracy", clean_tone_accuracy);
  report(2, "ensemble trend on the synthetic benchmark", [&] {
    bench_csv = run_bundled_bench(1, scratch_dir() / "bench_jobs1", &bench_code);
    if (bench_code != cli::kExitOk) return Outcome{false, fmt("bench exited with %d", bench_code)};
    return ensemble_trend(bench_csv);
  });
  report(3, "SNR exactness", snr_exactness);
  report(4, "scenario count", scenario_count);
  report(5, "pitch error oracle", metric_oracle);
  report(6, "brute-force equivalences", brute_force);
  report(7, "median robustness", median_robustness);
  report(8, "latency budget", latency);
  report(9, "external protocol", external_protocol);
  report(10, "determinism", [&] { return determinism(bench_csv, bench_code); });

  fs::remove_all(scratch_dir());
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
