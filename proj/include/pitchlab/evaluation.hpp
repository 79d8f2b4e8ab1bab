#pragma once

#include <optional>
#include <span>

namespace pitchlab {

/// (1/N) sum_n sqrt(|f_est(n) - f_truth(n)|), Hz. Unvoiced estimates count
/// as 0 Hz. Throws Errc::count_mismatch on unequal or empty inputs.
double pitch_error(std::span<const std::optional<double>> estimates, std::span<const double> truths);
double pitch_error(std::span<const double> estimates, std::span<const double> truths);

/// 69 + 12 log2(f / 440). Errc::non_positive_frequency for f <= 0.
double hz_to_midi(double hz);

/// Secondary metric (not the reference one): mean |midi_est - midi_truth|.
/// Unvoiced notes contribute a fixed 12 semitones.
double midi_error(std::span<const std::optional<double>> estimates, std::span<const double> truths);

/// |f / truth - 1| within a quarter tone (2^(1/24) - 1, about 2.93%).
bool within_quarter_tone(double estimate, double truth) noexcept;

}  // namespace pitchlab
