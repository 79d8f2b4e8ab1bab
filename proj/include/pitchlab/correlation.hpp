#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pitchlab/framing.hpp"

namespace pitchlab {

enum class CorrelationKind { acf, nsdf, yin_cmnd };

/// Values indexed by lag in samples, lag 0..max_lag inclusive.
struct CorrelationFunction {
  std::vector<double> values;
  CorrelationKind kind = CorrelationKind::acf;

  std::size_t max_lag() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

/// r(tau) = sum_{t=0}^{n-1-tau} x(t) x(t+tau). Errc::lag_out_of_range
/// unless max_lag < n. Short lag ranges are summed directly, longer ones
/// go through a zero-padded FFT.
CorrelationFunction autocorrelation(std::span<const double> x, std::size_t max_lag);
CorrelationFunction autocorrelation(const Frame& frame, std::size_t max_lag);

/// McLeod normalized square difference: 2 r(tau) / sum (x(t)^2 + x(t+tau)^2)
/// over the overlap; 0 where the denominator vanishes.
CorrelationFunction nsdf_function(std::span<const double> x, std::size_t max_lag);
CorrelationFunction nsdf_function(const Frame& frame, std::size_t max_lag);

/// YIN difference d(tau) = sum_{j<W} (x(j) - x(j+tau))^2 with a fixed
/// integration window W = n - max_lag.
std::vector<double> yin_difference(std::span<const double> x, std::size_t max_lag);

/// Cumulative-mean-normalized difference; d'(0) = 1.
CorrelationFunction yin_cmnd(std::span<const double> x, std::size_t max_lag);

/// c(tau) = sum_t a(t) b(t + tau) for tau in 0..max_lag, via FFT; terms
/// with t + tau past the end of b are zero.
std::vector<double> cross_correlation(std::span<const double> a, std::span<const double> b,
                                      std::size_t max_lag);

}  // namespace pitchlab
