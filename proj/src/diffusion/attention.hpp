#pragma once

#include "core/ops.hpp"

namespace eegdiff {

// Q = x * Wq^T, K = ctx * Wk^T, V = ctx * Wv^T, out = softmax(Q K^T / sqrt(d)) V.
// Wq is [d x d_eps] (queries from denoiser activations); Wk and Wv are
// [d x d_tau] (keys/values from the conditioning rows). heads > 1 splits d.
struct CrossAttentionWeights {
    Tensor wq, wk, wv;
};

Tensor cross_attention(const Tensor& x, const Tensor& context, const CrossAttentionWeights& w,
                       int64_t heads = 1);

} // namespace eegdiff
