#include "pitchlab/evaluation.hpp"

#include <cmath>
#include <string>

#include "pitchlab/error.hpp"

namespace pitchlab {
namespace {

void check_counts(std::size_t a, std::size_t b) {
  if (a != b || a == 0) {
    throw Error(Errc::count_mismatch, std::to_string(a) + " estimates vs " + std::to_string(b) + " truths");
  }
}

}  // namespace

double pitch_error(std::span<const std::optional<double>> estimates, std::span<const double> truths) {
  check_counts(estimates.size(), truths.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    sum += std::sqrt(std::abs(estimates[i].value_or(0.0) - truths[i]));
  }
  return sum / static_cast<double>(truths.size());
}

double pitch_error(std::span<const double> estimates, std::span<const double> truths) {
  check_counts(estimates.size(), truths.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) sum += std::sqrt(std::abs(estimates[i] - truths[i]));
  return sum / static_cast<double>(truths.size());
}

double hz_to_midi(double hz) {
  if (!(hz > 0.0)) throw Error(Errc::non_positive_frequency, "frequency must be positive");
  return 69.0 + 12.0 * std::log2(hz / 440.0);
}

double midi_error(std::span<const std::optional<double>> estimates, std::span<const double> truths) {
  check_counts(estimates.size(), truths.size());
  constexpr double kUnvoicedPenalty = 12.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    sum += estimates[i] ? std::abs(hz_to_midi(*estimates[i]) - hz_to_midi(truths[i])) : kUnvoicedPenalty;
  }
  return sum / static_cast<double>(truths.size());
}

bool within_quarter_tone(double estimate, double truth) noexcept {
  static const double kQuarterTone = std::pow(2.0, 1.0 / 24.0) - 1.0;
  return truth > 0.0 && std::abs(estimate / truth - 1.0) <= kQuarterTone;
}

}  // namespace pitchlab
