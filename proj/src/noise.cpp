#include "pitchlab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <regex>
#include <string>

#include "pitchlab/error.hpp"
#include "pitchlab/kernels.hpp"
#include "pitchlab/log.hpp"
#include "pitchlab/wav.hpp"

namespace pitchlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNoisePeak = 0.5;

// Uniform in [-1, 1) straight from the engine bits, so sequences do not
// depend on the standard library's distribution implementation.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-52 - 1.0; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// RBJ cookbook band-pass (0 dB peak gain), direct form I.
class BandPass {
 public:
  BandPass(double centre_hz, double q, int sample_rate) {
    const double w0 = kTwoPi * centre_hz / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    b0_ = alpha / a0;
    b2_ = -alpha / a0;
    a1_ = -2.0 * std::cos(w0) / a0;
    a2_ = (1.0 - alpha) / a0;
  }

  double operator()(double x) {
    const double y = b0_ * x + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double b0_, b2_, a1_, a2_;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

void normalize_peak(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0) kernels::scale(x, peak / m, x);
}

std::vector<double> white(std::size_t length, Uniform& rng) {
  std::vector<double> x(length);
  for (double& v : x) v = rng();
  return x;
}

// Paul Kellet's refined pink filter (accurate to about 0.05 dB above 9 Hz at 44.1 kHz).
std::vector<double> pink(std::size_t length, Uniform& rng) {
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  const auto step = [&](double w) {
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    const double out = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
    return out;
  };
  for (int i = 0; i < 8192; ++i) step(rng());  // settle the slow poles
  std::vector<double> x(length);
  for (double& v : x) v = step(rng());
  return x;
}

std::vector<double> hum50(std::size_t length, int sample_rate, Uniform& rng) {
  std::vector<double> x(length, 0.0);
  const double top = std::min(1000.0, 0.45 * sample_rate);
  for (int k = 1; 50.0 * k < top; k += 2) {
    const double phase = kTwoPi * rng.unit();
    const double w = kTwoPi * 50.0 * k / sample_rate;
    const double amp = 1.0 / k;
    for (std::size_t t = 0; t < length; ++t) x[t] += amp * std::sin(w * static_cast<double>(t) + phase);
  }
  return x;
}

std::vector<double> babble(std::size_t length, int sample_rate, Uniform& rng) {
  constexpr int kStreams = 8;
  std::vector<double> x(length, 0.0);
  for (int s = 0; s < kStreams; ++s) {
    const double centre = std::min(300.0 * std::pow(10.0, rng.unit()), 0.4 * sample_rate);  // 300..3000 Hz
    const double rate = 2.0 + 4.0 * rng.unit();                                               // syllabic 2..6 Hz
    const double phase = kTwoPi * rng.unit();
    BandPass filter(centre, 2.0, sample_rate);
    for (std::size_t t = 0; t < length; ++t) {
      const double env = 0.5 * (1.0 + std::sin(kTwoPi * rate * static_cast<double>(t) / sample_rate + phase));
      x[t] += env * env * filter(rng());
    }
  }
  return x;
}

}  // namespace

std::string_view noise_kind_name(NoiseKind kind) noexcept {
  switch (kind) {
    case NoiseKind::white: return "white";
    case NoiseKind::pink: return "pink";
    case NoiseKind::hum50: return "hum50";
    case NoiseKind::babble: return "babble";
  }
  return "unknown";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) noexcept {
  for (NoiseKind k : kSyntheticNoiseKinds) {
    if (noise_kind_name(k) == name) return k;
  }
  if (name == "babble-surrogate") return NoiseKind::babble;
  return std::nullopt;
}

std::vector<double> loop_to_length(std::span<const double> noise, std::size_t length) {
  if (noise.empty()) throw Error(Errc::silent_noise, "noise buffer is empty");
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; i += noise.size()) {
    const std::size_t n = std::min(noise.size(), length - i);
    std::copy_n(noise.begin(), n, out.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

double measure_snr(std::span<const double> signal, std::span<const double> noise_component) {
  if (signal.size() != noise_component.size()) {
    throw Error(Errc::count_mismatch, "signal and noise lengths differ");
  }
  const double pn = kernels::sum_squares(noise_component);
  if (!(pn > 0.0)) throw Error(Errc::silent_noise, "noise component has zero power");
  const double ps = kernels::sum_squares(signal);
  return 10.0 * std::log10(ps / pn);
}

MixResult mix_at_snr(const AudioBuffer& signal, const NoiseSource& noise, double snr_db) {
  if (signal.empty()) throw Error(Errc::empty_buffer, "cannot mix into an empty signal");
  if (signal.sample_rate() != noise.buffer.sample_rate()) {
    throw Error(Errc::sample_rate_mismatch, "signal at " + std::to_string(signal.sample_rate()) +
                                                " Hz, noise '" + noise.name + "' at " +
                                                std::to_string(noise.buffer.sample_rate()) + " Hz");
  }
  if (!std::isfinite(snr_db)) throw Error(Errc::invalid_config, "SNR must be finite");
  const auto looped = loop_to_length(noise.buffer.samples(), signal.size());
  const double n = static_cast<double>(signal.size());
  const double pn = kernels::sum_squares(looped) / n;
  if (!(pn > 0.0)) throw Error(Errc::silent_noise, "noise '" + noise.name + "' is silent");
  const double ps = signal.power();

  MixResult out;
  out.gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  out.noise_component.resize(signal.size());
  kernels::scale(looped, out.gain, out.noise_component);
  std::vector<double> mixed(signal.size());
  const auto s = signal.samples();
  for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = s[i] + out.noise_component[i];
  out.clipped_samples = static_cast<std::size_t>(
      std::count_if(mixed.begin(), mixed.end(), [](double v) { return std::abs(v) > 1.0; }));
  out.achieved_snr_db = ps > 0.0 ? measure_snr(s, out.noise_component) : -INFINITY;
  if (out.clipped_samples > 0) {
    log::info("mix with '" + noise.name + "' at " + std::to_string(snr_db) + " dB clipped " +
              std::to_string(out.clipped_samples) + " samples");
  }
  out.mixed = AudioBuffer(std::move(mixed), signal.sample_rate());
  return out;
}

NoiseSource synth_noise(NoiseKind kind, std::size_t length, int sample_rate, std::uint64_t seed) {
  if (length == 0) throw Error(Errc::empty_buffer, "noise length must be positive");
  Uniform rng(seed);
  std::vector<double> x;
  switch (kind) {
    case NoiseKind::white: x = white(length, rng); break;
    case NoiseKind::pink: x = pink(length, rng); break;
    case NoiseKind::hum50: x = hum50(length, sample_rate, rng); break;
    case NoiseKind::babble: x = babble(length, sample_rate, rng); break;
  }
  normalize_peak(x, kNoisePeak);
  NoiseSource src;
  src.name = std::string(noise_kind_name(kind));
  src.buffer = AudioBuffer(std::move(x), sample_rate);
  src.origin = NoiseOrigin::synthetic;
  return src;
}

std::vector<NoiseSource> synthetic_noise_set(std::size_t length, int sample_rate, std::uint64_t seed) {
  std::vector<NoiseSource> out;
  int id = 1;
  for (NoiseKind k : kSyntheticNoiseKinds) {
    NoiseSource src = synth_noise(k, length, sample_rate, seed + static_cast<std::uint64_t>(id) * 7919);
    src.id = id++;
    out.push_back(std::move(src));
  }
  return out;
}

std::vector<NoiseSource> load_noise_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::io_error, "noise directory " + dir.string() + " not found");
  static const std::regex pattern(R"(^(\d\d)_([A-Za-z0-9_\-]+)\.wav$)", std::regex::icase);
  std::vector<NoiseSource> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string file = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(file, m, pattern)) continue;
    const int id = std::stoi(m[1].str());
    if (id < 1 || id > static_cast<int>(kCorpusNoiseNames.size())) continue;
    NoiseSource src;
    src.id = id;
    src.name = m[2].str();
    src.buffer = read_wav(entry.path());
    src.origin = NoiseOrigin::ingested_file;
    if (!(src.buffer.power() > 0.0)) throw Error(Errc::silent_noise, "noise file " + file + " is silent");
    out.push_back(std::move(src));
  }
  std::sort(out.begin(), out.end(), [](const NoiseSource& a, const NoiseSource& b) { return a.id < b.id; });
  return out;
}

std::vector<Scenario> scenario_grid(std::span<const int> noise_ids, std::span<const double> snrs) {
  std::vector<Scenario> out;
  out.reserve(noise_ids.size() * snrs.size());
  for (int id : noise_ids) {
    for (double snr : snrs) out.push_back({id, snr});
  }
  return out;
}

}  // namespace pitchlab
