#include "nn/transformer.hpp"

#include <cmath>

namespace eegdiff {

Tensor sinusoidal_table(int64_t max_positions, int64_t dim) {
    std::vector<double> d(static_cast<size_t>(max_positions * dim));
    for (int64_t p = 0; p < max_positions; ++p) {
        for (int64_t i = 0; i < dim; i += 2) {
            const double rate = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
            d[static_cast<size_t>(p * dim + i)] = std::sin(p * rate);
            if (i + 1 < dim) d[static_cast<size_t>(p * dim + i + 1)] = std::cos(p * rate);
        }
    }
    return Tensor::from_data({max_positions, dim}, std::move(d));
}

Tensor self_attention(const Tensor& x, const Tensor& wq, const Tensor& bq, const Tensor& wk, const Tensor& bk,
                      const Tensor& wv, const Tensor& bv, const Tensor& wo, const Tensor& bo, int64_t heads) {
    const int64_t dim = x.extent(1);
    if (dim % heads != 0) throw ShapeError("attention dim not divisible by head count");
    const int64_t dh = dim / heads;
    Tensor q = linear(x, wq, bq);
    Tensor k = linear(x, wk, bk);
    Tensor v = linear(x, wv, bv);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Tensor merged;
    for (int64_t h = 0; h < heads; ++h) {
        Tensor qh = slice(q, 1, h * dh, dh);
        Tensor kh = slice(k, 1, h * dh, dh);
        Tensor vh = slice(v, 1, h * dh, dh);
        Tensor att = softmax(affine(matmul_nt(qh, kh), scale, 0.0), 1);
        Tensor oh = matmul(att, vh);
        merged = h == 0 ? oh : concat(merged, oh, 1);
    }
    return linear(merged, wo, bo);
}

TransformerBlock::TransformerBlock(ParamSet& params, const std::string& prefix, int64_t dim, int64_t heads,
                                   int64_t mlp_ratio, Rng& rng)
    : dim(dim), heads(heads) {
    const int64_t hidden = dim * mlp_ratio;
    ln1_g = params.add(prefix + ".ln1.g", Tensor::full({dim}, 1.0));
    ln1_b = params.add(prefix + ".ln1.b", Tensor::zeros({dim}));
    wq = params.add(prefix + ".attn.wq", glorot_uniform({dim, dim}, dim, dim, rng));
    bq = params.add(prefix + ".attn.bq", Tensor::zeros({dim}));
    wk = params.add(prefix + ".attn.wk", glorot_uniform({dim, dim}, dim, dim, rng));
    bk = params.add(prefix + ".attn.bk", Tensor::zeros({dim}));
    wv = params.add(prefix + ".attn.wv", glorot_uniform({dim, dim}, dim, dim, rng));
    bv = params.add(prefix + ".attn.bv", Tensor::zeros({dim}));
    wo = params.add(prefix + ".attn.wo", glorot_uniform({dim, dim}, dim, dim, rng));
    bo = params.add(prefix + ".attn.bo", Tensor::zeros({dim}));
    ln2_g = params.add(prefix + ".ln2.g", Tensor::full({dim}, 1.0));
    ln2_b = params.add(prefix + ".ln2.b", Tensor::zeros({dim}));
    w1 = params.add(prefix + ".mlp.w1", glorot_uniform({hidden, dim}, dim, hidden, rng));
    b1 = params.add(prefix + ".mlp.b1", Tensor::zeros({hidden}));
    w2 = params.add(prefix + ".mlp.w2", glorot_uniform({dim, hidden}, hidden, dim, rng));
    b2 = params.add(prefix + ".mlp.b2", Tensor::zeros({dim}));
}

Tensor TransformerBlock::forward(const Tensor& x) const {
    Tensor h = add(x, self_attention(layer_norm(x, ln1_g, ln1_b), wq, bq, wk, bk, wv, bv, wo, bo, heads));
    Tensor m = linear(gelu(linear(layer_norm(h, ln2_g, ln2_b), w1, b1)), w2, b2);
    return add(h, m);
}

} // namespace eegdiff
