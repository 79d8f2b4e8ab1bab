#include <atomic>
#include <cstdlib>
#include <string_view>

#include "pitchlab/error.hpp"
#include "tables.hpp"

namespace pitchlab::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(PITCHLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() noexcept {
  const KernelTable* best = avx2_table();
  if (const char* env = std::getenv("PITCHLAB_SIMD")) {
    if (std::string_view(env) == "scalar") return &scalar_table();
  }
  return best ? best : &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw Error(Errc::count_mismatch, "kernel operands differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() noexcept { return detail::scalar(); }

const KernelTable* avx2_table() noexcept {
#if defined(PITCHLAB_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
  const KernelTable* table = isa == Isa::scalar ? &scalar_table() : avx2_table();
  if (table == nullptr) return false;
  active_slot().store(table);
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  check_sizes(a.size(), b.size());
  check_sizes(a.size(), out.size());
  active().multiply(a.data(), b.data(), out.data(), a.size());
}

void magnitude(std::span<const std::complex<double>> z, std::span<double> out) {
  check_sizes(z.size(), out.size());
  active().magnitude(reinterpret_cast<const double*>(z.data()), out.data(), z.size());
}

void power_inplace(std::span<std::complex<double>> z) {
  active().power_inplace(reinterpret_cast<double*>(z.data()), z.size());
}

void accumulate(std::span<double> acc, std::span<const double> x) {
  check_sizes(acc.size(), x.size());
  active().accumulate(acc.data(), x.data(), x.size());
}

void axpy(std::span<const double> x, double g, std::span<const double> y, std::span<double> out) {
  check_sizes(x.size(), y.size());
  check_sizes(x.size(), out.size());
  active().axpy(x.data(), g, y.data(), out.data(), x.size());
}

void scale(std::span<const double> x, double s, std::span<double> out) {
  check_sizes(x.size(), out.size());
  active().scale(x.data(), s, out.data(), x.size());
}

}  // namespace pitchlab::kernels
