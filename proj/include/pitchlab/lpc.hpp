#pragma once

#include <span>
#include <vector>

#include "pitchlab/framing.hpp"

namespace pitchlab {

/// Predictor coefficients a_1..a_order from Levinson-Durbin on the
/// autocorrelation of x. Throws Errc::lpc_unstable for zero-energy input or
/// a non-positive prediction error.
std::vector<double> lpc_coefficients(std::span<const double> x, int order);

/// e(t) = x(t) - sum_i a_i x(t - i), with x(t) = 0 before the frame.
Frame lpc_residual(const Frame& frame, int order);

/// Geometric over arithmetic mean of the power spectrum (bins 1..N/2-1).
double spectral_flatness(std::span<const double> samples);

}  // namespace pitchlab
