#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and, where the target supports it, an AVX2/FMA variant.
// The active table is chosen once at startup from CPUID and can be pinned
// with PITCHLAB_SIMD=scalar|avx2 or select().

namespace pitchlab::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]; a and b have equal length.
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = |z[i]| for interleaved (re, im) pairs
  void (*magnitude)(const double* interleaved, double* out, std::size_t n);
  // out[i] = |z[i]|^2 written back as (|z|^2, 0) pairs, in place
  void (*power_inplace)(double* interleaved, std::size_t n);
  // acc[i] += x[i]
  void (*accumulate)(double* acc, const double* x, std::size_t n);
  // out[i] = x[i] + g * y[i]
  void (*axpy)(const double* x, double g, const double* y, double* out, std::size_t n);
  // out[i] = scale * x[i]
  void (*scale)(const double* x, double scale, double* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

/// The table used by every analysis routine.
const KernelTable& active() noexcept;

/// Pins the active table; returns false (and leaves it unchanged) if the
/// requested ISA is unavailable. Intended for tests and benchmarking.
bool select(Isa isa) noexcept;

// Convenience wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> x);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
void magnitude(std::span<const std::complex<double>> z, std::span<double> out);
void power_inplace(std::span<std::complex<double>> z);
void accumulate(std::span<double> acc, std::span<const double> x);
void axpy(std::span<const double> x, double g, std::span<const double> y, std::span<double> out);
void scale(std::span<const double> x, double s, std::span<double> out);

}  // namespace pitchlab::kernels
