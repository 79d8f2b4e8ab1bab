#include "pitchlab/correlation.hpp"

#include <algorithm>
#include <complex>
#include <string>

#include "pitchlab/error.hpp"
#include "pitchlab/fft.hpp"
#include "pitchlab/kernels.hpp"

namespace pitchlab {
namespace {

// Below this many lags the direct O(n * lags) sum beats the FFT round trip.
constexpr std::size_t kDirectLagLimit = 32;

void check_lag(std::size_t n, std::size_t max_lag) {
  if (max_lag >= n) {
    throw Error(Errc::lag_out_of_range,
                "max lag " + std::to_string(max_lag) + " must be below frame length " + std::to_string(n));
  }
}

std::vector<double> prefix_energy(std::span<const double> x) {
  std::vector<double> q(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) q[i + 1] = q[i] + x[i] * x[i];
  return q;
}

}  // namespace

std::vector<double> cross_correlation(std::span<const double> a, std::span<const double> b, std::size_t max_lag) {
  const std::size_t m = fft::next_power_of_two(std::max(a.size() + max_lag + 1, b.size()));
  std::vector<double> pa(m, 0.0), pb(m, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  auto fa = fft::forward(pa);
  const auto fb = fft::forward(pb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] = std::conj(fa[k]) * fb[k];
  auto c = fft::inverse(fa, m);
  c.resize(max_lag + 1);
  return c;
}

CorrelationFunction autocorrelation(std::span<const double> x, std::size_t max_lag) {
  check_lag(x.size(), max_lag);
  CorrelationFunction out;
  out.kind = CorrelationKind::acf;
  const std::size_t n = x.size();
  if (max_lag < kDirectLagLimit) {
    out.values.resize(max_lag + 1);
    for (std::size_t tau = 0; tau <= max_lag; ++tau) {
      out.values[tau] = kernels::dot(x.first(n - tau), x.subspan(tau));
    }
    return out;
  }
  const std::size_t m = fft::next_power_of_two(n + max_lag + 1);
  std::vector<double> padded(m, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  auto spec = fft::forward(padded);
  kernels::power_inplace(spec);
  auto r = fft::inverse(spec, m);
  r.resize(max_lag + 1);
  out.values = std::move(r);
  return out;
}

CorrelationFunction autocorrelation(const Frame& frame, std::size_t max_lag) {
  return autocorrelation(std::span<const double>(frame.samples), max_lag);
}

CorrelationFunction nsdf_function(std::span<const double> x, std::size_t max_lag) {
  CorrelationFunction r = autocorrelation(x, max_lag);
  const auto q = prefix_energy(x);
  const std::size_t n = x.size();
  for (std::size_t tau = 0; tau <= max_lag; ++tau) {
    const double m = q[n - tau] + (q[n] - q[tau]);
    r.values[tau] = m > 0.0 ? std::clamp(2.0 * r.values[tau] / m, -1.0, 1.0) : 0.0;
  }
  r.kind = CorrelationKind::nsdf;
  return r;
}

CorrelationFunction nsdf_function(const Frame& frame, std::size_t max_lag) {
  return nsdf_function(std::span<const double>(frame.samples), max_lag);
}

std::vector<double> yin_difference(std::span<const double> x, std::size_t max_lag) {
  check_lag(x.size(), max_lag);
  const std::size_t w = x.size() - max_lag;
  const auto c = cross_correlation(x.first(w), x, max_lag);
  const auto q = prefix_energy(x);
  std::vector<double> d(max_lag + 1, 0.0);
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    const double v = q[w] + (q[w + tau] - q[tau]) - 2.0 * c[tau];
    d[tau] = std::max(v, 0.0);
  }
  return d;
}

CorrelationFunction yin_cmnd(std::span<const double> x, std::size_t max_lag) {
  const auto d = yin_difference(x, max_lag);
  CorrelationFunction out;
  out.kind = CorrelationKind::yin_cmnd;
  out.values.assign(max_lag + 1, 1.0);
  double running = 0.0;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    running += d[tau];
    out.values[tau] = running > 0.0 ? d[tau] * static_cast<double>(tau) / running : 1.0;
  }
  return out;
}

}  // namespace pitchlab
