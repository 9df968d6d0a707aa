#pragma once

#include "pbda/kernels.hpp"

namespace pbda::kernels::detail {

// Table compiled into the AVX2 translation unit, or null when that unit was
// built without AVX2 support. Callers must still check the CPU at runtime.
const Ops* avx2_table();

}  // namespace pbda::kernels::detail
