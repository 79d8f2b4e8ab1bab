#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pitchlab/framing.hpp"
#include "pitchlab/spectrum.hpp"

namespace pitchlab {

enum class Method { acf, nsdf, yin, hps, stft, ml, cepstrum, srh };

/// Registry order; reports list methods in this order.
inline constexpr std::array<Method, 8> kAllMethods = {
    Method::acf, Method::nsdf, Method::yin, Method::hps,
    Method::stft, Method::ml, Method::cepstrum, Method::srh};

std::string_view method_name(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

/// Search range and harmonic count for one estimator.
struct EstimatorConfig {
  double f_min = 0.0;
  double f_max = 0.0;
  int n_harmonics = 1;

  /// Throws Errc::config_out_of_range unless 0 <= f_min < f_max <= fs/2
  /// and n_harmonics >= 1.
  void validate(int sample_rate) const;
  /// f_max capped at Nyquist (HPS defaults to "Nyquist").
  EstimatorConfig resolved(int sample_rate) const;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

/// Per-method defaults. HPS: (0, Nyquist, 3); STFT: (20, 1000, 4);
/// ML: (20, 800, 5); SRH: (80, 500, 5); ACF/NSDF/YIN/cepstrum: (20, 1000, 1).
EstimatorConfig default_config(Method method, int sample_rate);

/// Framing and voicing knobs shared by all estimators.
struct AnalysisParams {
  std::size_t frame_len = 2048;
  std::size_t hop = 512;
  // Windowed frames are zero-padded to this many points before the FFT in
  // the spectral estimators (HPS, STFT, ML, SRH); no padding when <= frame_len.
  std::size_t fft_size = 8192;
  double silence_rms = 1e-5;
  int lpc_order = 12;
  double yin_threshold = 0.15;
  double nsdf_cutoff = 0.8;
};

struct PitchEstimate {
  std::optional<double> f0;
  std::string method;
  std::vector<std::optional<double>> per_frame;

  bool voiced() const noexcept { return f0.has_value(); }
  static PitchEstimate unvoiced(std::string_view method) {
    return PitchEstimate{std::nullopt, std::string(method), {}};
  }
};

/// Candidate f0 values, ascending. `index` holds the spectral bin (frequency
/// grids) or the lag in samples (lag grids) behind each candidate.
struct CandidateGrid {
  std::vector<double> candidates;
  std::vector<std::size_t> index;

  std::size_t size() const noexcept { return candidates.size(); }
  bool empty() const noexcept { return candidates.empty(); }
};

/// One candidate per bin with f_min <= f <= f_max, never bin 0, and no
/// bin above max_bin.
CandidateGrid bin_grid(const Spectrum& spectrum, const EstimatorConfig& cfg, std::size_t max_bin);

/// Integer lags [ceil(fs/f_max), min(floor(fs/f_min), frame_len/2)], listed
/// by ascending frequency (descending lag).
CandidateGrid lag_grid(int sample_rate, const EstimatorConfig& cfg, std::size_t frame_len);

// Score vectors, one entry per grid candidate. Harmonic reads use the
// nearest bin; reads past Nyquist contribute 0.
std::vector<double> hps_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics);
std::vector<double> harmonic_sum_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics);
std::vector<double> ml_comb_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics);
std::vector<double> srh_scores(const Spectrum& spectrum, const CandidateGrid& grid, int n_harmonics);

/// Index of the maximum; ties go to the lowest index (lowest frequency).
std::size_t argmax_lowest(std::span<const double> scores);

/// Sub-bin refinement of the winning candidate: a parabola through its score
/// and its neighbours' (log scores when all three are positive), offset
/// limited to half a bin. Candidates at the grid edge are returned as is.
double refine_candidate_hz(const CandidateGrid& grid, std::span<const double> scores, std::size_t best,
                           double bin_hz);

// Frame-level estimators.
PitchEstimate hps_estimate(const Spectrum& spectrum, const EstimatorConfig& cfg);
PitchEstimate stft_energy_estimate(const Spectrogram& spectrogram, const EstimatorConfig& cfg,
                                   const AnalysisParams& params = {});
PitchEstimate ml_comb_estimate(const Spectrum& spectrum, const EstimatorConfig& cfg);
PitchEstimate cepstrum_estimate(const Frame& frame, const EstimatorConfig& cfg,
                                const AnalysisParams& params = {});
PitchEstimate srh_frame_estimate(const Frame& frame, const EstimatorConfig& cfg,
                                 const AnalysisParams& params = {});
PitchEstimate srh_estimate(std::span<const Frame> note_frames, const EstimatorConfig& cfg,
                           const AnalysisParams& params = {});
PitchEstimate acf_estimate(const Frame& frame, const EstimatorConfig& cfg,
                           const AnalysisParams& params = {});
PitchEstimate nsdf_estimate(const Frame& frame, const EstimatorConfig& cfg,
                            const AnalysisParams& params = {});
PitchEstimate yin_estimate(const Frame& frame, const EstimatorConfig& cfg,
                           const AnalysisParams& params = {});

/// Median with the even-count rule (mean of the two middle values).
/// nullopt for an empty input.
std::optional<double> median(std::vector<double> values);

/// Median of the voiced entries; nullopt when none are voiced.
std::optional<double> median_voiced(std::span<const std::optional<double>> values);

/// Note-level estimate: frame the note, estimate each frame, take the
/// median of voiced frames. STFT instead sums energy over all frames.
PitchEstimate estimate_note(Method method, std::span<const double> note, int sample_rate,
                            const EstimatorConfig& cfg, const AnalysisParams& params = {});

inline PitchEstimate estimate_note(Method method, std::span<const double> note, int sample_rate,
                                   const AnalysisParams& params = {}) {
  return estimate_note(method, note, sample_rate, default_config(method, sample_rate), params);
}

}  // namespace pitchlab
