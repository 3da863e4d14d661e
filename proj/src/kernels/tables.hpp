#pragma once

#include "swingsafe/kernels.hpp"

namespace swingsafe::kernels {

namespace scalar {
extern const Table kTable;
}

#if defined(SWINGSAFE_BUILD_AVX2)
namespace avx2 {
extern const Table kTable;
}
#endif

} // namespace swingsafe::kernels
