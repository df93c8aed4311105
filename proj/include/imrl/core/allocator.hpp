#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace imrl {

/// Keeps large Eigen temporaries on the heap instead of mmap/munmap per
/// allocation, which otherwise dominates system time for wide networks.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

}  // namespace imrl
