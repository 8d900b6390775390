#pragma once

#include <cstdint>

namespace spttn {

// In-repo micro-kernels behind the executor's dispatch seam. Strided like
// their BLAS counterparts so vendor routines could be swapped in.

/// y[i*incy] += alpha * x[i*incx]
inline void scaled_vector_accumulate(int64_t n, double alpha, const double* x, int64_t incx,
                                     double* y, int64_t incy) {
  for (int64_t i = 0; i < n; ++i) y[i * incy] += alpha * x[i * incx];
}

/// A[i*row + j*col] += x[i*incx] * y[j*incy]
inline void rank1_update(int64_t m, int64_t n, const double* x, int64_t incx, const double* y,
                         int64_t incy, double* a, int64_t row, int64_t col) {
  for (int64_t i = 0; i < m; ++i) {
    const double xi = x[i * incx];
    for (int64_t j = 0; j < n; ++j) a[i * row + j * col] += xi * y[j * incy];
  }
}

}  // namespace spttn
