// Reference kernels. These define the semantics the SIMD variants are
// tested against, so keep them as plain loops.

#include <cmath>

#include "tables.hpp"

namespace pitchlab::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void magnitude(const double* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    out[i] = std::sqrt(re * re + im * im);
  }
}

void power_inplace(double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    z[2 * i] = re * re + im * im;
    z[2 * i + 1] = 0.0;
  }
}

void accumulate(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void axpy(const double* x, double g, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + g * y[i];
}

void scale(const double* x, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s * x[i];
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{Isa::scalar, dot, sum_squares, multiply, magnitude,
                                 power_inplace, accumulate, axpy, scale};
  return table;
}

}  // namespace pitchlab::kernels::detail
