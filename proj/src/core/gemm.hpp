#pragma once

#include <cstdint>

namespace eegdiff {

// c[m x n] = op_a(a) * op_b(b) on row-major double buffers. Single-threaded
// by construction so training steps replay bit-identically.
void gemm(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n, bool trans_a,
          bool trans_b);

} // namespace eegdiff
