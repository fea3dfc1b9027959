#pragma once

#include "core/ops.hpp"
#include "core/params.hpp"

namespace eegdiff {

// Fixed sinusoidal positional table [max_positions x dim].
Tensor sinusoidal_table(int64_t max_positions, int64_t dim);

// Multi-head self-attention over [N x dim] rows (no masking; full context).
Tensor self_attention(const Tensor& x, const Tensor& wq, const Tensor& bq, const Tensor& wk, const Tensor& bk,
                      const Tensor& wv, const Tensor& bv, const Tensor& wo, const Tensor& bo, int64_t heads);

// Pre-norm transformer block: x + attn(ln(x)), then x + mlp(ln(x)).
struct TransformerBlock {
    int64_t dim = 0;
    int64_t heads = 1;
    Tensor ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor ln2_g, ln2_b, w1, b1, w2, b2;

    TransformerBlock() = default;
    TransformerBlock(ParamSet& params, const std::string& prefix, int64_t dim, int64_t heads,
                     int64_t mlp_ratio, Rng& rng);

    Tensor forward(const Tensor& x) const;
};

} // namespace eegdiff
