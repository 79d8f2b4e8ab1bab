#pragma once

#include "pitchlab/kernels.hpp"

namespace pitchlab::kernels::detail {

const KernelTable& scalar();

// Defined only when the AVX2 translation unit is compiled in.
const KernelTable& avx2();

}  // namespace pitchlab::kernels::detail
