#pragma once

#include "divplan/simd/kernels.hpp"

namespace divplan::simd::detail {

extern const KernelTable kScalarTable;

#if defined(DIVPLAN_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

} // namespace divplan::simd::detail
