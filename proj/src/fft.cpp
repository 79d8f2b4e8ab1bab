#include "pitchlab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace pitchlab::fft {
namespace {

// FFTW planning is not thread-safe; execution on a shared plan with the
// new-array interface is. Plans are built once per size under a lock and
// kept for the life of the process.
struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex g_plan_mutex;

const Plans& plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(g_plan_mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<Plans>();
    const int len = static_cast<int>(n);
    double* real = fftw_alloc_real(n);
    fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->forward = fftw_plan_dft_r2c_1d(len, real, cplx, flags);
    slot->inverse = fftw_plan_dft_c2r_1d(len, cplx, real, flags | FFTW_DESTROY_INPUT);
    fftw_free(real);
    fftw_free(cplx);
  }
  return *slot;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> input) {
  const std::size_t n = input.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  if (n == 0) return out;
  std::vector<double> in(input.begin(), input.end());
  fftw_execute_dft_r2c(plans_for(n).forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse(std::span<const std::complex<double>> spectrum, std::size_t n) {
  std::vector<double> out(n);
  if (n == 0) return out;
  std::vector<std::complex<double>> in(n / 2 + 1);
  std::copy_n(spectrum.begin(), std::min(spectrum.size(), in.size()), in.begin());
  fftw_execute_dft_c2r(plans_for(n).inverse, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double norm = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= norm;
  return out;
}

}  // namespace pitchlab::fft
