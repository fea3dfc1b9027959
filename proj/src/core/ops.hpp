#pragma once

#include <vector>

#include "core/tape.hpp"
#include "core/tensor.hpp"

namespace eegdiff {

// Elementwise (shapes must match exactly; no broadcasting).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor affine(const Tensor& x, double scale, double shift); // scale*x + shift
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

// Matrix ops (2-d).
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b); // a * b^T
Tensor transpose(const Tensor& x);
Tensor reshape(const Tensor& x, const Shape& shape);

// Reductions.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor mean_rows(const Tensor& x); // [N x d] -> [1 x d]

// Neural-net primitives.
Tensor softmax(const Tensor& x, int axis);
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);
Tensor add_rowvec(const Tensor& x, const Tensor& b);       // [N x d] + [d]
Tensor add_channel_bias(const Tensor& x, const Tensor& b); // [C,H,W] + [C]
Tensor cross_entropy(const Tensor& logits, const std::vector<int64_t>& labels);
Tensor l2_normalize(const Tensor& x); // [d] or [1 x d]

// Structural ops (2-d unless noted).
Tensor slice(const Tensor& x, int axis, int64_t start, int64_t len);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor gather_rows(const Tensor& x, const std::vector<int64_t>& idx);
// Embedding lookup is a row gather over the table.
inline Tensor embedding(const Tensor& table, const std::vector<int64_t>& idx) {
    return gather_rows(table, idx);
}

// Convolutions (valid padding for 1-d; zero padding for 2-d).
Tensor conv1d(const Tensor& x, const Tensor& kernels, int64_t stride);
Tensor conv2d(const Tensor& x, const Tensor& kernels, int64_t stride, int64_t pad);
Tensor upsample_nearest2(const Tensor& x); // [C,H,W] -> [C,2H,2W]

// x[N x in] * w[out x in]^T + b[out]
inline Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    return add_rowvec(matmul_nt(x, w), b);
}

} // namespace eegdiff
