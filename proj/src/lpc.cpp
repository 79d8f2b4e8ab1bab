#include "pitchlab/lpc.hpp"

#include <cmath>
#include <string>

#include "pitchlab/correlation.hpp"
#include "pitchlab/error.hpp"
#include "pitchlab/fft.hpp"

namespace pitchlab {

std::vector<double> lpc_coefficients(std::span<const double> x, int order) {
  if (order < 0 || static_cast<std::size_t>(order) >= x.size()) {
    throw Error(Errc::lag_out_of_range, "LPC order " + std::to_string(order) + " out of range");
  }
  if (order == 0) return {};
  const auto r = autocorrelation(x, static_cast<std::size_t>(order)).values;
  if (!(r[0] > 0.0)) throw Error(Errc::lpc_unstable, "zero-energy frame");

  // Levinson-Durbin. a[i] are predictor coefficients: x(t) ~ sum a_i x(t-i).
  std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
  std::vector<double> prev(a.size(), 0.0);
  double error = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[static_cast<std::size_t>(i)];
    for (int j = 1; j < i; ++j) acc -= a[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(i - j)];
    const double k = acc / error;
    prev = a;
    a[static_cast<std::size_t>(i)] = k;
    for (int j = 1; j < i; ++j) {
      a[static_cast<std::size_t>(j)] = prev[static_cast<std::size_t>(j)] - k * prev[static_cast<std::size_t>(i - j)];
    }
    error *= 1.0 - k * k;
    if (!(error > 0.0) || !std::isfinite(error)) {
      throw Error(Errc::lpc_unstable, "singular autocorrelation matrix at order " + std::to_string(i));
    }
  }
  a.erase(a.begin());
  return a;
}

Frame lpc_residual(const Frame& frame, int order) {
  const auto a = lpc_coefficients(frame.samples, order);
  Frame out = frame;
  const auto& x = frame.samples;
  for (std::size_t t = 0; t < x.size(); ++t) {
    double pred = 0.0;
    const std::size_t taps = std::min(a.size(), t);
    for (std::size_t i = 1; i <= taps; ++i) pred += a[i - 1] * x[t - i];
    out.samples[t] = x[t] - pred;
  }
  return out;
}

double spectral_flatness(std::span<const double> samples) {
  const auto bins = fft::forward(samples);
  if (bins.size() < 3) return 0.0;
  double log_sum = 0.0;
  double sum = 0.0;
  const std::size_t count = bins.size() - 2;
  for (std::size_t k = 1; k + 1 < bins.size(); ++k) {
    const double p = std::norm(bins[k]) + 1e-300;
    log_sum += std::log(p);
    sum += p;
  }
  return std::exp(log_sum / static_cast<double>(count)) / (sum / static_cast<double>(count));
}

}  // namespace pitchlab
