// AVX2 + FMA kernels. Compiled with -mavx2 -mfma; only reached through the
// dispatch table after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "tables.hpp"

namespace pitchlab::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares(const double* x, std::size_t n) { return dot(x, x, n); }

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

// |z|^2 for four interleaved complex values, returned in order.
inline __m256d norm4(const double* z) {
  const __m256d v0 = _mm256_loadu_pd(z);      // re0 im0 re1 im1
  const __m256d v1 = _mm256_loadu_pd(z + 4);  // re2 im2 re3 im3
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
  return _mm256_permute4x64_pd(h, 0b11011000);
}

void magnitude(const double* z, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_sqrt_pd(norm4(z + 2 * i)));
  for (; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    out[i] = std::sqrt(re * re + im * im);
  }
}

void power_inplace(double* z, std::size_t n) {
  std::size_t i = 0;
  const __m256d zero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d p = norm4(z + 2 * i);  // p0 p1 p2 p3
    // Interleave with zeros: (p0, 0, p1, 0), (p2, 0, p3, 0).
    const __m256d lo = _mm256_permute4x64_pd(p, 0b01010000);  // p0 p0 p1 p1
    const __m256d hi = _mm256_permute4x64_pd(p, 0b11111010);  // p2 p2 p3 p3
    _mm256_storeu_pd(z + 2 * i, _mm256_blend_pd(lo, zero, 0b1010));
    _mm256_storeu_pd(z + 2 * i + 4, _mm256_blend_pd(hi, zero, 0b1010));
  }
  for (; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    z[2 * i] = re * re + im * im;
    z[2 * i + 1] = 0.0;
  }
}

void accumulate(double* acc, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

void axpy(const double* x, double g, const double* y, double* out, std::size_t n) {
  const __m256d gv = _mm256_set1_pd(g);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(gv, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) out[i] = std::fma(g, y[i], x[i]);
}

void scale(const double* x, double s, double* out, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(sv, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = s * x[i];
}

}  // namespace

const KernelTable& avx2() {
  static const KernelTable table{Isa::avx2, dot, sum_squares, multiply, magnitude,
                                 power_inplace, accumulate, axpy, scale};
  return table;
}

}  // namespace pitchlab::kernels::detail
