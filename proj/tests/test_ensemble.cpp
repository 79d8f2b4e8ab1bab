#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "pitchlab/ensemble.hpp"
#include "pitchlab/error.hpp"
#include "pitchlab/external.hpp"
#include "pitchlab/synth.hpp"

using namespace pitchlab;

namespace {

constexpr int kFs = 44100;

std::string stub(const std::string& args) { return std::string("'") + PITCHLAB_STUB + "' " + args; }

ExternalEstimator external(const std::string& args, double timeout = 5.0) {
  ExternalEstimator e;
  e.command = stub(args);
  e.timeout_s = timeout;
  return e;
}

using Votes = std::vector<std::optional<double>>;

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected pitchlab::Error");
  return Errc::io_error;
}

// Sets an environment variable for the lifetime of the guard.
class EnvGuard {
 public:
  EnvGuard(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~EnvGuard() {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }
  EnvGuard(const EnvGuard&) = delete;
  EnvGuard& operator=(const EnvGuard&) = delete;

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST_CASE("fusion examples") {
  CHECK(fuse_votes(Votes{218.0, 219.0, 220.0, 221.0, 440.0}) == 220.0);
  CHECK(fuse_votes(Votes{220.0, 440.0}) == 330.0);
  CHECK_FALSE(fuse_votes(Votes{std::nullopt, std::nullopt, std::nullopt, 220.0}).has_value());
  CHECK(fuse_votes(Votes{std::nullopt, 200.0, 210.0}) == 205.0);
  CHECK_FALSE(fuse_votes(Votes{}).has_value());
}

TEST_CASE("outlier robustness: corrupting a minority keeps the median inside the inlier envelope") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 4);
  std::uniform_real_distribution<double> inlier(200.0, 240.0);
  std::uniform_real_distribution<double> wild(-1e6, 1e6);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 * static_cast<std::size_t>(size(rng)) + 1;
    std::vector<double> votes(m);
    for (double& v : votes) v = inlier(rng);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t bad = (m - 1) / 2;
    std::vector<double> inliers;
    for (std::size_t i = bad; i < m; ++i) inliers.push_back(votes[order[i]]);
    for (std::size_t i = 0; i < bad; ++i) votes[order[i]] = wild(rng);
    const Votes v(votes.begin(), votes.end());
    const auto f = fuse_votes(v);
    REQUIRE(f.has_value());
    CHECK(*f >= *std::min_element(inliers.begin(), inliers.end()));
    CHECK(*f <= *std::max_element(inliers.begin(), inliers.end()));
  }
}

TEST_CASE("fusion is invariant to member order") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> f(50.0, 1000.0);
  for (int trial = 0; trial < 200; ++trial) {
    Votes v;
    for (int i = 0; i < 6; ++i) v.push_back(i % 4 == 3 ? std::nullopt : std::optional<double>(f(rng)));
    const auto ref = fuse_votes(v);
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(fuse_votes(v) == ref);
  }
}

TEST_CASE("ensemble spec validation") {
  EnsembleSpec spec = EnsembleSpec::defaults(kFs);
  CHECK(spec.members.size() == 4);
  CHECK_NOTHROW(spec.validate());
  spec.members.push_back(spec.members.front());
  CHECK(code_of([&] { spec.validate(); }) == Errc::invalid_config);

  EnsembleSpec one;
  one.members.push_back({Method::hps, default_config(Method::hps, kFs)});
  CHECK(code_of([&] { one.validate(); }) == Errc::invalid_config);
  one.external = external("reply UNVOICED");
  CHECK_NOTHROW(one.validate());
  one.external->timeout_s = 0.0;
  CHECK(code_of([&] { one.validate(); }) == Errc::invalid_config);
}

TEST_CASE("ensemble spec file parsing") {
  const auto spec = parse_ensemble_spec(
      R"({"members": ["hps", {"name": "ml", "f_min": 30, "n_harmonics": 4}],
          "external": {"command": "true", "timeout": 2.5, "f_min": 40, "f_max": 2000},
          "quorum": 2})",
      kFs);
  REQUIRE(spec.members.size() == 2);
  CHECK(spec.members[1].method == Method::ml);
  CHECK(spec.members[1].config == EstimatorConfig{30.0, 800.0, 4});
  REQUIRE(spec.external.has_value());
  CHECK(spec.external->timeout_s == 2.5);
  CHECK(spec.external->f_min == 40.0);

  const auto defaults = parse_ensemble_spec("{}", kFs);
  CHECK(defaults.members.size() == 4);
  CHECK_FALSE(defaults.external.has_value());

  CHECK(code_of([] { parse_ensemble_spec(R"({"members": ["crepe", "hps"]})", kFs); }) == Errc::unknown_method);
  CHECK(code_of([] { parse_ensemble_spec("not json", kFs); }) == Errc::invalid_config);
}

TEST_CASE("environment variable supplies the external command") {
  EnvGuard guard(kExternalEnvVar, stub("reply 'F0 440'"));
  const auto spec = parse_ensemble_spec("{}", kFs);
  REQUIRE(spec.external.has_value());
  CHECK(spec.external->command == stub("reply 'F0 440'"));
}

TEST_CASE("request encoding is the header plus little-endian float32") {
  const std::vector<double> x{0.5, -1.0, 0.25};
  const std::string req = encode_external_request(x, 16000);
  const std::string header = "RATE 16000 COUNT 3\n";
  REQUIRE(req.size() == header.size() + 12);
  CHECK(req.substr(0, header.size()) == header);
  for (std::size_t i = 0; i < x.size(); ++i) {
    unsigned char b[4];
    std::memcpy(b, req.data() + header.size() + 4 * i, 4);
    const std::uint32_t bits = std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
                               std::uint32_t(b[3]) << 24;
    float f;
    std::memcpy(&f, &bits, 4);
    CHECK(f == static_cast<float>(x[i]));
  }
}

TEST_CASE("reply parsing") {
  CHECK(parse_external_reply("F0 440\n") == 440.0);
  CHECK(parse_external_reply("F0 261.63") == doctest::Approx(261.63));
  CHECK_FALSE(parse_external_reply("UNVOICED\n").has_value());
  for (const char* bad : {"", "F0", "F0 abc", "f0 440", "F0 440 extra", "HELLO", "F0 nan", "F0 -5"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { parse_external_reply(bad); }) == Errc::protocol_violation);
  }
}

TEST_CASE("external stub: reply, timeout, out-of-range") {
  const auto note = sawtooth(220.0, 4410, kFs, 0.4);

  const auto ok = run_external(external("reply 'F0 440'"), note, kFs);
  REQUIRE(ok.voiced());
  CHECK(*ok.f0 == 440.0);

  const auto start = std::chrono::steady_clock::now();
  const auto slow = run_external(external("sleep 30", 0.5), note, kFs);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK_FALSE(slow.voiced());
  CHECK(elapsed < 5.0);

  CHECK_FALSE(run_external(external("reply 'F0 10000'"), note, kFs).voiced());
}

TEST_CASE("external stub: garbage, silence, missing program") {
  const auto note = sawtooth(220.0, 4410, kFs, 0.4);
  CHECK_FALSE(run_external(external("reply 'what is this'"), note, kFs).voiced());
  CHECK_FALSE(run_external(external("reply UNVOICED"), note, kFs).voiced());
  ExternalEstimator missing;
  missing.command = "/nonexistent/estimator";
  CHECK_FALSE(run_external(missing, note, kFs).voiced());
  // Exits without printing anything.
  ExternalEstimator quiet;
  quiet.command = "true";
  CHECK_FALSE(run_external(quiet, note, kFs).voiced());
}

TEST_CASE("external stub sees every sample, including a large payload") {
  const auto note = sawtooth(220.0, 3 * kFs, kFs, 0.4);
  auto counter = external("echo-count");
  counter.f_max = 1e7;
  const auto e = run_external(counter, note, kFs);
  REQUIRE(e.voiced());
  CHECK(*e.f0 == static_cast<double>(note.size()));
}

TEST_CASE("external stub that never reads stdin still answers") {
  const auto note = sawtooth(220.0, 2 * kFs, kFs, 0.4);
  const auto e = run_external(external("noread 'F0 300'"), note, kFs);
  REQUIRE(e.voiced());
  CHECK(*e.f0 == 300.0);
}

TEST_CASE("ensemble on a clean tone") {
  const auto note = sawtooth(246.94, kFs / 2, kFs, 0.4);
  const auto spec = EnsembleSpec::defaults(kFs);
  const auto e = ensemble_estimate(note, kFs, spec);
  REQUIRE(e.voiced());
  CHECK(std::abs(*e.f0 / 246.94 - 1.0) < 0.01);
  CHECK(e.per_frame.size() == 4);
  CHECK(e.method == "ensemble");
}

TEST_CASE("an always-unvoiced external leaves ensemble results unchanged") {
  const auto base = EnsembleSpec::defaults(kFs);
  auto with_external = base;
  with_external.external = external("reply UNVOICED");
  for (double f : {110.0, 174.6, 220.0, 311.1, 440.0}) {
    const auto note = sawtooth(f, kFs / 3, kFs, 0.4);
    const auto a = ensemble_estimate(note, kFs, base);
    const auto b = ensemble_estimate(note, kFs, with_external);
    CHECK(a.f0 == b.f0);
    CHECK(b.per_frame.size() == 5);
    CHECK_FALSE(b.per_frame.back().has_value());
  }
}

TEST_CASE("external votes take part in the median") {
  auto spec = EnsembleSpec::defaults(kFs);
  spec.members.resize(2);  // hps, stft
  spec.external = external("reply 'F0 1000'");
  const auto note = sawtooth(220.0, kFs / 3, kFs, 0.4);
  const auto e = ensemble_estimate(note, kFs, spec);
  REQUIRE(e.voiced());
  // Two members near 220 and one outlier: the median stays with the pair.
  CHECK(std::abs(*e.f0 / 220.0 - 1.0) < 0.01);
}
