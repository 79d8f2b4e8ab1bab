#include "pitchlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pitchlab/correlation.hpp"
#include "pitchlab/error.hpp"
#include "pitchlab/fft.hpp"
#include "pitchlab/kernels.hpp"
#include "pitchlab/lpc.hpp"

namespace pitchlab {
namespace {

constexpr double kGridSlack = 1e-9;
constexpr double kCepstrumFloor = 1e-10;

PitchEstimate voiced(Method method, double f0, const EstimatorConfig& cfg) {
  // Sub-bin refinement may step just outside the search range.
  const double lo = cfg.f_min > 0.0 ? cfg.f_min : std::numeric_limits<double>::min();
  return PitchEstimate{std::clamp(f0, lo, cfg.f_max), std::string(method_name(method)), {}};
}

PitchEstimate unvoiced(Method method) { return PitchEstimate::unvoiced(method_name(method)); }

EstimatorConfig checked(const EstimatorConfig& cfg, int sample_rate) {
  const EstimatorConfig r = cfg.resolved(sample_rate);
  r.validate(sample_rate);
  return r;
}

int rate_of(const Spectrum& s) { return static_cast<int>(std::lround(s.bin_hz * static_cast<double>(s.fft_size()))); }

// Parabolic vertex offset in [-0.5, 0.5] through (-1, a), (0, b), (1, c).
double parabolic_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

bool silent(const Frame& frame, const AnalysisParams& params) { return frame.rms() < params.silence_rms; }

Frame hann_of(const Frame& frame) {
  return frame.window == WindowKind::hann ? frame : apply_window(frame, WindowKind::hann);
}

Spectrum padded_spectrum(const Frame& frame, const AnalysisParams& params) {
  return magnitude_spectrum(zero_pad(hann_of(frame), params.fft_size));
}

// Lag range as (min_lag, max_lag), inclusive.
std::pair<std::size_t, std::size_t> lag_range(int sample_rate, const EstimatorConfig& cfg, std::size_t frame_len) {
  const CandidateGrid grid = lag_grid(sample_rate, cfg, frame_len);
  if (grid.empty()) {
    throw Error(Errc::config_out_of_range, "no integer lag inside [" + std::to_string(cfg.f_min) + ", " +
                                               std::to_string(cfg.f_max) + "] Hz for this frame length");
  }
  return {grid.index.back(), grid.index.front()};
}

}  // namespace

std::string_view method_name(Method method) noexcept {
  switch (method) {
    case Method::acf: return "acf";
    case Method::nsdf: return "nsdf";
    case Method::yin: return "yin";
    case Method::hps: return "hps";
    case Method::stft: return "stft";
    case Method::ml: return "ml";
    case Method::cepstrum: return "cepstrum";
    case Method::srh: return "srh";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

void EstimatorConfig::validate(int sample_rate) const {
  const double nyquist = sample_rate / 2.0;
  if (!(f_min >= 0.0) || !(f_min < f_max) || !(f_max <= nyquist) || n_harmonics < 1) {
    throw Error(Errc::config_out_of_range,
                "need 0 <= f_min < f_max <= " + std::to_string(nyquist) + " and n_harmonics >= 1 (got f_min=" +
                    std::to_string(f_min) + ", f_max=" + std::to_string(f_max) +
                    ", n_harmonics=" + std::to_string(n_harmonics) + ")");
  }
}

EstimatorConfig EstimatorConfig::resolved(int sample_rate) const {
  EstimatorConfig r = *this;
  r.f_max = std::min(f_max, sample_rate / 2.0);
  return r;
}

EstimatorConfig default_config(Method method, int sample_rate) {
  const double nyquist = sample_rate / 2.0;
  switch (method) {
    case Method::hps: return {0.0, nyquist, 3};
    case Method::stft: return {20.0, 1000.0, 4};
    case Method::ml: return {20.0, 800.0, 5};
    case Method::srh: return {80.0, 500.0, 5};
    case Method::acf:
    case Method::nsdf:
    case Method::yin:
    case Method::cepstrum: return {20.0, 1000.0, 1};
  }
  return {20.0, 1000.0, 1};
}

CandidateGrid bin_grid(const Spectrum& spectrum, const EstimatorConfig& cfg, std::size_t max_bin) {
  CandidateGrid grid;
  if (spectrum.size() < 2 || spectrum.bin_hz <= 0.0) return grid;
  const double lo = std::max(1.0, std::ceil(cfg.f_min / spectrum.bin_hz - kGridSlack));
  const double hi = std::min({std::floor(cfg.f_max / spectrum.bin_hz + kGridSlack),
                              static_cast<double>(max_bin), static_cast<double>(spectrum.size() - 1)});
  for (double b = lo; b <= hi; b += 1.0) {
    grid.index.push_back(static_cast<std::size_t>(b));
    grid.candidates.push_back(b * spectrum.bin_hz);
  }
  return grid;
}

CandidateGrid lag_grid(int sample_rate, const EstimatorConfig& cfg, std::size_t frame_len) {
  CandidateGrid grid;
  const double fs = sample_rate;
  const double lo = std::max(2.0, std::ceil(fs / cfg.f_max - kGridSlack));
  double hi = static_cast<double>(frame_len / 2);
  if (cfg.f_min > 0.0) hi = std::min(hi, std::floor(fs / cfg.f_min + kGridSlack));
  for (double lag = hi; lag >= lo; lag -= 1.0) {
    grid.index.push_back(static_cast<std::size_t>(lag));
    grid.candidates.push_back(fs / lag);
  }
  return grid;
}

std::vector<double> hps_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics) {
  std::vector<double> scores(grid.size());
  const auto& x = spectrum.magnitudes;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double p = 1.0;
    for (int h = 1; h <= n_harmonics; ++h) {
      const std::size_t bin = grid.index[i] * static_cast<std::size_t>(h);
      p *= bin < x.size() ? x[bin] : 0.0;
    }
    scores[i] = p;
  }
  return scores;
}

std::vector<double> harmonic_sum_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics) {
  std::vector<double> scores(grid.size());
  const auto& x = spectrum.magnitudes;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (int h = 1; h <= n_harmonics; ++h) {
      const std::size_t bin = grid.index[i] * static_cast<std::size_t>(h);
      if (bin < x.size()) s += x[bin];
    }
    scores[i] = s;
  }
  return scores;
}

std::vector<double> ml_comb_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics) {
  std::vector<double> scores(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (int n = 1; n <= n_harmonics; ++n) s += spectrum.at_hz(n * grid.candidates[i]);
    scores[i] = s;
  }
  return scores;
}

std::vector<double> srh_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics) {
  std::vector<double> scores(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double f = grid.candidates[i];
    double s = spectrum.at_hz(f);
    for (int k = 2; k <= n_harmonics; ++k) s += spectrum.at_hz(k * f) - spectrum.at_hz((k - 0.5) * f);
    scores[i] = s;
  }
  return scores;
}

std::size_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

double refine_candidate_hz(const CandidateGrid& grid, std::span<const double> scores, std::size_t best,
                           double bin_hz) {
  const double center = grid.candidates[best];
  if (best == 0 || best + 1 >= scores.size()) return center;
  const double a = scores[best - 1], b = scores[best], c = scores[best + 1];
  const double offset = a > 0.0 && b > 0.0 && c > 0.0 ? parabolic_offset(std::log(a), std::log(b), std::log(c))
                                                      : parabolic_offset(a, b, c);
  return center + offset * bin_hz;
}

PitchEstimate hps_estimate(const Spectrum& spectrum, const EstimatorConfig& cfg_in) {
  const int fs = rate_of(spectrum);
  const EstimatorConfig cfg = cfg_in.resolved(fs);
  if (cfg.f_min >= spectrum.nyquist()) throw Error(Errc::config_out_of_range, "HPS f_min at or above Nyquist");
  cfg.validate(fs);
  if (spectrum.all_zero()) return unvoiced(Method::hps);
  const std::size_t max_bin = (spectrum.size() - 1) / static_cast<std::size_t>(cfg.n_harmonics);
  const CandidateGrid grid = bin_grid(spectrum, cfg, max_bin);
  if (grid.empty()) throw Error(Errc::config_out_of_range, "HPS candidate range is empty");
  const auto scores = hps_scores(spectrum, grid, cfg.n_harmonics);
  const std::size_t best = argmax_lowest(scores);
  if (!(scores[best] > 0.0)) return unvoiced(Method::hps);
  EstimatorConfig clamp_range = cfg;
  clamp_range.f_min = std::max(cfg.f_min, spectrum.bin_hz);
  return voiced(Method::hps, refine_candidate_hz(grid, scores, best, spectrum.bin_hz), clamp_range);
}

PitchEstimate stft_energy_estimate(const Spectrogram& spectrogram, const EstimatorConfig& cfg_in,
                                   const AnalysisParams&) {
  if (spectrogram.frames.empty()) return unvoiced(Method::stft);
  const Spectrum& first = spectrogram.frames.front();
  const int fs = rate_of(first);
  const EstimatorConfig cfg = checked(cfg_in, fs);

  Spectrum energy;
  energy.bin_hz = first.bin_hz;
  energy.magnitudes.assign(first.size(), 0.0);
  for (const Spectrum& s : spectrogram.frames) {
    if (s.size() != energy.size()) throw Error(Errc::count_mismatch, "spectrogram frames differ in length");
    kernels::accumulate(energy.magnitudes, s.magnitudes);
  }
  if (energy.all_zero()) return unvoiced(Method::stft);

  const CandidateGrid grid = bin_grid(energy, cfg, energy.size() - 1);
  if (grid.empty()) throw Error(Errc::config_out_of_range, "STFT candidate range is empty");
  const auto scores = harmonic_sum_scores(energy, grid, cfg.n_harmonics);
  const std::size_t best = argmax_lowest(scores);
  if (!(scores[best] > 0.0)) return unvoiced(Method::stft);
  return voiced(Method::stft, refine_candidate_hz(grid, scores, best, energy.bin_hz), cfg);
}

PitchEstimate ml_comb_estimate(const Spectrum& spectrum, const EstimatorConfig& cfg_in) {
  const int fs = rate_of(spectrum);
  const EstimatorConfig cfg = checked(cfg_in, fs);
  if (spectrum.all_zero()) return unvoiced(Method::ml);
  const CandidateGrid grid = bin_grid(spectrum, cfg, spectrum.size() - 1);
  if (grid.empty()) throw Error(Errc::config_out_of_range, "ML candidate range is empty");
  const auto scores = ml_comb_scores(spectrum, grid, cfg.n_harmonics);
  const std::size_t best = argmax_lowest(scores);
  if (!(scores[best] > 0.0)) return unvoiced(Method::ml);
  return voiced(Method::ml, refine_candidate_hz(grid, scores, best, spectrum.bin_hz), cfg);
}

PitchEstimate cepstrum_estimate(const Frame& frame, const EstimatorConfig& cfg_in, const AnalysisParams& params) {
  const EstimatorConfig cfg = checked(cfg_in, frame.sample_rate);
  const auto [lag_lo, lag_hi] = lag_range(frame.sample_rate, cfg, frame.size());
  if (silent(frame, params)) return unvoiced(Method::cepstrum);

  const Spectrum spectrum = magnitude_spectrum(hann_of(frame));
  std::vector<std::complex<double>> log_mag(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) log_mag[k] = std::log(spectrum.magnitudes[k] + kCepstrumFloor);
  const auto cep = fft::inverse(log_mag, frame.size());

  std::size_t best = lag_hi;
  for (std::size_t q = lag_hi; q-- > lag_lo;) {
    if (cep[q] > cep[best]) best = q;
  }
  return voiced(Method::cepstrum, static_cast<double>(frame.sample_rate) / static_cast<double>(best), cfg);
}

PitchEstimate srh_frame_estimate(const Frame& frame, const EstimatorConfig& cfg_in, const AnalysisParams& params) {
  const EstimatorConfig cfg = checked(cfg_in, frame.sample_rate);
  if (silent(frame, params)) return unvoiced(Method::srh);
  Frame residual;
  try {
    residual = hann_of(lpc_residual(frame, params.lpc_order));
  } catch (const Error& e) {
    if (e.code() == Errc::lpc_unstable) return unvoiced(Method::srh);
    throw;
  }
  const Spectrum e = magnitude_spectrum(zero_pad(residual, params.fft_size));
  if (e.all_zero()) return unvoiced(Method::srh);
  const CandidateGrid grid = bin_grid(e, cfg, e.size() - 1);
  if (grid.empty()) throw Error(Errc::config_out_of_range, "SRH candidate range is empty");
  const auto scores = srh_scores(e, grid, cfg.n_harmonics);
  const std::size_t best = argmax_lowest(scores);
  return voiced(Method::srh, refine_candidate_hz(grid, scores, best, e.bin_hz), cfg);
}

PitchEstimate srh_estimate(std::span<const Frame> note_frames, const EstimatorConfig& cfg,
                           const AnalysisParams& params) {
  PitchEstimate out = unvoiced(Method::srh);
  out.per_frame.reserve(note_frames.size());
  for (const Frame& f : note_frames) out.per_frame.push_back(srh_frame_estimate(f, cfg, params).f0);
  out.f0 = median_voiced(out.per_frame);
  return out;
}

PitchEstimate acf_estimate(const Frame& frame, const EstimatorConfig& cfg_in, const AnalysisParams& params) {
  const EstimatorConfig cfg = checked(cfg_in, frame.sample_rate);
  const auto [lag_lo, lag_hi] = lag_range(frame.sample_rate, cfg, frame.size());
  if (silent(frame, params)) return unvoiced(Method::acf);

  const auto r = autocorrelation(frame, lag_hi + 1).values;
  // Local maxima only, so the descending flank near lag 0 cannot win.
  std::optional<std::size_t> best;
  for (std::size_t tau = lag_lo; tau <= lag_hi; ++tau) {
    const bool peak = r[tau] >= r[tau - 1] && r[tau] >= r[tau + 1];
    if (peak && (!best || r[tau] >= r[*best])) best = tau;
  }
  if (!best) {
    best = lag_lo;
    for (std::size_t tau = lag_lo; tau <= lag_hi; ++tau) {
      if (r[tau] >= r[*best]) best = tau;
    }
  }
  return voiced(Method::acf, static_cast<double>(frame.sample_rate) / static_cast<double>(*best), cfg);
}

PitchEstimate nsdf_estimate(const Frame& frame, const EstimatorConfig& cfg_in, const AnalysisParams& params) {
  const EstimatorConfig cfg = checked(cfg_in, frame.sample_rate);
  const auto [lag_lo, lag_hi] = lag_range(frame.sample_rate, cfg, frame.size());
  if (silent(frame, params)) return unvoiced(Method::nsdf);

  const auto n = nsdf_function(frame, lag_hi + 1).values;

  // Key maxima: local peaks after the function first dips below zero.
  std::size_t start = lag_lo;
  for (std::size_t tau = 1; tau <= lag_hi; ++tau) {
    if (n[tau] < 0.0) {
      start = std::max(lag_lo, tau);
      break;
    }
  }
  std::vector<std::size_t> peaks;
  for (std::size_t tau = start; tau <= lag_hi; ++tau) {
    if (n[tau] > n[tau - 1] && n[tau] >= n[tau + 1]) peaks.push_back(tau);
  }

  std::size_t chosen = lag_lo;
  if (peaks.empty()) {
    for (std::size_t tau = lag_lo; tau <= lag_hi; ++tau) {
      if (n[tau] >= n[chosen]) chosen = tau;
    }
  } else {
    double global = -1.0;
    for (std::size_t p : peaks) global = std::max(global, n[p]);
    const double cutoff = params.nsdf_cutoff * global;
    chosen = peaks.back();
    for (std::size_t p : peaks) {
      if (n[p] >= cutoff) {
        chosen = p;
        break;
      }
    }
  }
  const double period = static_cast<double>(chosen) + parabolic_offset(n[chosen - 1], n[chosen], n[chosen + 1]);
  return voiced(Method::nsdf, frame.sample_rate / period, cfg);
}

PitchEstimate yin_estimate(const Frame& frame, const EstimatorConfig& cfg_in, const AnalysisParams& params) {
  const EstimatorConfig cfg = checked(cfg_in, frame.sample_rate);
  const auto [lag_lo, lag_hi] = lag_range(frame.sample_rate, cfg, frame.size());
  if (silent(frame, params)) return unvoiced(Method::yin);

  const auto d = yin_cmnd(frame.samples, lag_hi + 1).values;
  std::optional<std::size_t> tau_star;
  for (std::size_t tau = lag_lo; tau <= lag_hi; ++tau) {
    if (d[tau] < params.yin_threshold) {
      while (tau + 1 <= lag_hi && d[tau + 1] < d[tau]) ++tau;
      tau_star = tau;
      break;
    }
  }
  if (!tau_star) {
    std::size_t best = lag_lo;
    for (std::size_t tau = lag_lo; tau <= lag_hi; ++tau) {
      if (d[tau] <= d[best]) best = tau;
    }
    tau_star = best;
  }
  const std::size_t t = *tau_star;
  // Parabolic offset of a minimum: same vertex as the maximum of -d.
  const double period = static_cast<double>(t) + parabolic_offset(-d[t - 1], -d[t], -d[t + 1]);
  return voiced(Method::yin, frame.sample_rate / period, cfg);
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::optional<double> median_voiced(std::span<const std::optional<double>> values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& x : values) {
    if (x) v.push_back(*x);
  }
  return median(std::move(v));
}

PitchEstimate estimate_note(Method method, std::span<const double> note, int sample_rate,
                            const EstimatorConfig& cfg_in, const AnalysisParams& params) {
  const EstimatorConfig cfg = checked(cfg_in, sample_rate);
  if (note.empty()) return unvoiced(method);
  const auto frames = frame_signal(note, sample_rate, params.frame_len, params.hop, WindowKind::rectangular);

  if (method == Method::stft) {
    Spectrogram sg;
    sg.hop = params.hop;
    for (const Frame& f : frames) {
      if (!silent(f, params)) sg.frames.push_back(padded_spectrum(f, params));
    }
    return stft_energy_estimate(sg, cfg, params);
  }

  PitchEstimate out = unvoiced(method);
  out.per_frame.reserve(frames.size());
  for (const Frame& frame : frames) {
    if (silent(frame, params)) {
      out.per_frame.emplace_back();
      continue;
    }
    PitchEstimate e;
    switch (method) {
      case Method::hps: e = hps_estimate(padded_spectrum(frame, params), cfg); break;
      case Method::ml: e = ml_comb_estimate(padded_spectrum(frame, params), cfg); break;
      case Method::cepstrum: e = cepstrum_estimate(frame, cfg, params); break;
      case Method::srh: e = srh_frame_estimate(frame, cfg, params); break;
      case Method::acf: e = acf_estimate(frame, cfg, params); break;
      case Method::nsdf: e = nsdf_estimate(frame, cfg, params); break;
      case Method::yin: e = yin_estimate(frame, cfg, params); break;
      case Method::stft: break;
    }
    out.per_frame.push_back(e.f0);
  }
  out.f0 = median_voiced(out.per_frame);
  return out;
}

}  // namespace pitchlab
