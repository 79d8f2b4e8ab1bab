#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pitchlab/annotation.hpp"
#include "pitchlab/cli.hpp"
#include "pitchlab/evaluation.hpp"
#include "pitchlab/noise.hpp"
#include "pitchlab/synth.hpp"
#include "pitchlab/wav.hpp"

using namespace pitchlab;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case.
class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("pitchlab_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& leaf) const { return path_ / leaf; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct SongFiles {
  fs::path wav;
  fs::path notes;
  SyntheticSong song;
};

SongFiles write_song(const TempDir& dir, std::uint64_t seed, int notes = 10) {
  SongSynthParams p;
  p.min_notes = notes;
  p.max_notes = notes;
  SongFiles f{dir / "song.wav", dir / "song.txt", synth_song(seed, p)};
  write_wav_float(f.wav, f.song.audio);
  save_annotation(f.notes, f.song.notes);
  return f;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string("'") + PITCHLAB_TOOL + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("estimate lists one line per note within a quarter tone") {
  TempDir dir("estimate");
  const auto f = write_song(dir, 21);
  for (const std::string method : {"ensemble", "acf"}) {
    CAPTURE(method);
    std::ostringstream out, err;
    double wall = -1.0;
    cli::EstimateOptions opt{f.wav, f.notes, method};
    REQUIRE(cli::cmd_estimate(opt, out, err, &wall) == cli::kExitOk);
    CHECK(wall >= 0.0);
    CHECK(err.str().find("wall_time_s=") != std::string::npos);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 10);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::istringstream fields(lines[i]);
      double onset = 0, offset = 0, f0 = 0, midi = 0;
      REQUIRE(static_cast<bool>(fields >> onset >> offset >> f0 >> midi));
      const double truth = *f.song.notes[i].f0_truth;
      CHECK(within_quarter_tone(f0, truth));
      CHECK(std::abs(midi - hz_to_midi(f0)) < 1e-3);
      CHECK(onset == doctest::Approx(f.song.notes[i].onset).epsilon(1e-6));
    }
  }
}

TEST_CASE("estimate exit codes") {
  TempDir dir("estimate_codes");
  const auto f = write_song(dir, 22, 8);
  std::ostringstream out, err;

  cli::EstimateOptions unknown{f.wav, f.notes, "crepe"};
  CHECK(cli::cmd_estimate(unknown, out, err) == cli::kExitUsage);
  // Unknown methods are rejected before the audio is touched.
  cli::EstimateOptions unknown_missing{dir / "absent.wav", f.notes, "crepe"};
  CHECK(cli::cmd_estimate(unknown_missing, out, err) == cli::kExitUsage);

  cli::EstimateOptions missing{dir / "absent.wav", f.notes, "yin"};
  CHECK(cli::cmd_estimate(missing, out, err) == cli::kExitBadInput);

  std::ofstream(dir / "garbage.wav") << "not audio";
  cli::EstimateOptions garbage{dir / "garbage.wav", f.notes, "yin"};
  CHECK(cli::cmd_estimate(garbage, out, err) == cli::kExitBadInput);

  std::ofstream(dir / "empty.txt").close();
  cli::EstimateOptions empty{f.wav, dir / "empty.txt", "yin"};
  CHECK(cli::cmd_estimate(empty, out, err) == cli::kExitBadAnnotation);

  std::ofstream(dir / "bad.txt") << "1.0 0.5 220\n";
  cli::EstimateOptions bad{f.wav, dir / "bad.txt", "yin"};
  CHECK(cli::cmd_estimate(bad, out, err) == cli::kExitBadAnnotation);

  cli::EstimateOptions no_notes{f.wav, dir / "absent.txt", "yin"};
  CHECK(cli::cmd_estimate(no_notes, out, err) == cli::kExitBadInput);
}

TEST_CASE("estimate prints unvoiced for silent notes") {
  TempDir dir("estimate_silent");
  write_wav_float(dir / "silence.wav", AudioBuffer(std::vector<double>(44100, 0.0), 44100));
  std::ofstream(dir / "notes.txt") << "0.1 0.5 220\n";
  std::ostringstream out, err;
  cli::EstimateOptions opt{dir / "silence.wav", dir / "notes.txt", "ensemble"};
  REQUIRE(cli::cmd_estimate(opt, out, err) == cli::kExitOk);
  CHECK(out.str() == "0.100000 0.500000 unvoiced unvoiced\n");
}

TEST_CASE("mix writes a float WAV at the requested SNR") {
  TempDir dir("mix");
  const auto f = write_song(dir, 23, 8);
  std::ostringstream out, err;
  cli::MixOptions opt{f.wav, "synth:white", "0", dir / "mixed.wav", 5};
  REQUIRE(cli::cmd_mix(opt, out, err) == cli::kExitOk);
  CHECK(out.str().rfind("achieved_snr_db=0.0000 ", 0) == 0);

  WavInfo info;
  const auto mixed = read_wav(dir / "mixed.wav", &info);
  CHECK(info.is_float);
  CHECK(info.bits_per_sample == 32);
  const auto clean = read_wav(f.wav);
  REQUIRE(mixed.size() == clean.size());
  std::vector<double> noise(mixed.size());
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = mixed.samples()[i] - clean.samples()[i];
  CHECK(std::abs(measure_snr(clean.samples(), noise)) < 0.01);
}

TEST_CASE("mix SNR spelling and errors") {
  CHECK(cli::parse_snr("+20") == cli::parse_snr("20"));
  CHECK(cli::parse_snr("-5.5") == -5.5);
  CHECK_THROWS(cli::parse_snr("20dB"));
  CHECK_THROWS(cli::parse_snr(""));

  TempDir dir("mix_errors");
  const auto f = write_song(dir, 24, 8);
  std::ostringstream out, err;
  cli::MixOptions plus{f.wav, "synth:pink", "+20", dir / "a.wav", 1};
  cli::MixOptions bare{f.wav, "synth:pink", "20", dir / "b.wav", 1};
  REQUIRE(cli::cmd_mix(plus, out, err) == cli::kExitOk);
  REQUIRE(cli::cmd_mix(bare, out, err) == cli::kExitOk);
  CHECK(read_text(dir / "a.wav") == read_text(dir / "b.wav"));

  cli::MixOptions missing{f.wav, (dir / "absent.wav").string(), "0", dir / "c.wav", 1};
  CHECK(cli::cmd_mix(missing, out, err) == cli::kExitBadInput);

  write_wav_float(dir / "noise16k.wav", AudioBuffer(std::vector<double>(16000, 0.1), 16000));
  cli::MixOptions rate{f.wav, (dir / "noise16k.wav").string(), "0", dir / "d.wav", 1};
  CHECK(cli::cmd_mix(rate, out, err) == cli::kExitBadInput);

  cli::MixOptions kind{f.wav, "synth:rain", "0", dir / "e.wav", 1};
  CHECK(cli::cmd_mix(kind, out, err) == cli::kExitUsage);
  cli::MixOptions snr{f.wav, "synth:white", "loud", dir / "e.wav", 1};
  CHECK(cli::cmd_mix(snr, out, err) == cli::kExitUsage);
}

TEST_CASE("bench writes tables, reruns identically and honours method selection") {
  TempDir dir("bench");
  std::ofstream(dir / "bench.json")
      << R"({"synthetic_songs": 1, "synthetic_noises": ["white", "hum50"], "noise_length_s": 2,
            "snrs": [0, 20], "methods": ["yin", "srh", "ensemble"], "seed": 3})";
  std::ostringstream out, err;
  cli::BenchOptions a{dir / "bench.json", dir / "a"};
  REQUIRE(cli::cmd_bench(a, out, err) == cli::kExitOk);
  CHECK(fs::exists(dir / "a/table.csv"));
  CHECK(fs::exists(dir / "a/table.txt"));
  CHECK(out.str().find("Noisy audio error") != std::string::npos);
  const auto csv = read_text(dir / "a/results.csv");
  CHECK(lines_of(csv).size() == 1 + 3 * (1 + 4));

  cli::BenchOptions b{dir / "bench.json", dir / "b"};
  b.jobs = 3;
  REQUIRE(cli::cmd_bench(b, out, err) == cli::kExitOk);
  CHECK(read_text(dir / "b/results.csv") == csv);

  cli::BenchOptions only{dir / "bench.json", dir / "c"};
  only.methods = "ensemble";
  REQUIRE(cli::cmd_bench(only, out, err) == cli::kExitOk);
  const auto table = lines_of(read_text(dir / "c/table.csv"));
  REQUIRE(table.size() == 2);
  CHECK(table[1].rfind("ensemble,", 0) == 0);

  cli::BenchOptions reseeded{dir / "bench.json", dir / "d"};
  reseeded.seed = 4;
  reseeded.methods = "yin";
  REQUIRE(cli::cmd_bench(reseeded, out, err) == cli::kExitOk);
  CHECK(read_text(dir / "d/results.csv") != read_text(dir / "c/results.csv"));
}

TEST_CASE("bench exit codes") {
  TempDir dir("bench_codes");
  std::ostringstream out, err;
  cli::BenchOptions absent{dir / "absent.json", dir / "out"};
  CHECK(cli::cmd_bench(absent, out, err) == cli::kExitBadInput);

  fs::create_directories(dir / "songs");
  std::ofstream(dir / "empty.json") << R"({"songs_dir": "songs", "methods": ["yin"], "snrs": [0]})";
  cli::BenchOptions no_songs{dir / "empty.json", dir / "out"};
  CHECK(cli::cmd_bench(no_songs, out, err) == cli::kExitNoSongs);

  // A song with a broken annotation is skipped, leaving nothing to score.
  write_wav_float(dir / "songs/a.wav", AudioBuffer(std::vector<double>(4410, 0.1), 44100));
  std::ofstream(dir / "songs/a.txt") << "0.5 0.1 220\n";
  CHECK(cli::cmd_bench(no_songs, out, err) == cli::kExitNoSongs);

  std::ofstream(dir / "unknown.json") << R"({"methods": ["crepe"]})";
  cli::BenchOptions unknown{dir / "unknown.json", dir / "out"};
  CHECK(cli::cmd_bench(unknown, out, err) == cli::kExitUsage);
}

TEST_CASE("report renders a results CSV") {
  TempDir dir("report");
  std::ofstream(dir / "results.csv") << "method,noise_id,snr_db,error\n"
                                        "hps,clean,,0.5\n"
                                        "hps,1,-5,2\n"
                                        "hps,1,20,4\n";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_report({dir / "results.csv", "csv"}, out, err) == cli::kExitOk);
  CHECK(out.str() == "method,noise_1,clean,noisy_avg\nhps,3.000000,0.500000,3.000000\n");
  std::ostringstream text;
  REQUIRE(cli::cmd_report({dir / "results.csv", "text"}, text, err) == cli::kExitOk);
  CHECK(text.str().find("Clean audio error") != std::string::npos);
  CHECK(cli::cmd_report({dir / "results.csv", "html"}, out, err) == cli::kExitUsage);
  CHECK(cli::cmd_report({dir / "absent.csv", "text"}, out, err) == cli::kExitBadInput);
  std::ofstream(dir / "junk.csv") << "a,b\n";
  CHECK(cli::cmd_report({dir / "junk.csv", "text"}, out, err) == cli::kExitBadInput);
}

TEST_CASE("synth writes a song and its annotation") {
  TempDir dir("synth");
  std::ostringstream out, err;
  cli::SynthOptions opt{dir / "s.wav", dir / "s.txt", 7, 15.0};
  REQUIRE(cli::cmd_synth(opt, out, err) == cli::kExitOk);
  const auto audio = read_wav(dir / "s.wav");
  CHECK(std::abs(audio.duration() - 15.0) < 1.5);
  CHECK_NOTHROW(load_annotation(dir / "s.txt"));
}

TEST_CASE("command line front end") {
  TempDir dir("tool");
  const auto f = write_song(dir, 25, 8);
  const std::string wav = "'" + f.wav.string() + "'";
  const std::string notes = "'" + f.notes.string() + "'";
  CHECK(run_tool("--help") == cli::kExitOk);
  CHECK(run_tool("") == cli::kExitUsage);
  CHECK(run_tool("frobnicate") == cli::kExitUsage);
  CHECK(run_tool("estimate " + wav) == cli::kExitUsage);
  CHECK(run_tool("estimate " + wav + " " + notes + " --method yin") == cli::kExitOk);
  CHECK(run_tool("estimate " + wav + " " + notes + " --method crepe") == cli::kExitUsage);
  CHECK(run_tool("estimate /nonexistent.wav " + notes) == cli::kExitBadInput);
  CHECK(run_tool("mix " + wav + " synth:babble --snr +10 --out '" + (dir / "m.wav").string() + "'") ==
        cli::kExitOk);
  CHECK(run_tool("mix " + wav + " synth:babble --snr -5 --out '" + (dir / "n.wav").string() + "'") ==
        cli::kExitOk);
  CHECK(fs::exists(dir / "n.wav"));
  CHECK(run_tool("bench /nonexistent.json") == cli::kExitBadInput);
  CHECK(run_tool("bench x.json --jobs 0") == cli::kExitUsage);
  CHECK(run_tool("report /nonexistent.csv") == cli::kExitBadInput);
}

TEST_CASE("environment variable adds an external member to estimate") {
  TempDir dir("env");
  const auto f = write_song(dir, 26, 8);
  ::setenv("PITCHLAB_EXTERNAL", (std::string("'") + PITCHLAB_STUB + "' reply 'F0 440'").c_str(), 1);
  std::ostringstream with, err;
  cli::EstimateOptions opt{f.wav, f.notes, "ensemble"};
  REQUIRE(cli::cmd_estimate(opt, with, err) == cli::kExitOk);
  ::unsetenv("PITCHLAB_EXTERNAL");
  std::ostringstream without;
  REQUIRE(cli::cmd_estimate(opt, without, err) == cli::kExitOk);
  // A fifth vote at 440 Hz moves at least one median among these low notes.
  CHECK(with.str() != without.str());
}
