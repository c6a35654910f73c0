#pragma once

#include "ratgraph/kernels.hpp"

namespace ratgraph::kernels::detail {

const KernelTable& scalar_kernels();

#if defined(RATGRAPH_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

}  // namespace ratgraph::kernels::detail
