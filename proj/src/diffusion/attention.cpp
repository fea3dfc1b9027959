#include "diffusion/attention.hpp"

#include <cmath>

namespace eegdiff {

Tensor cross_attention(const Tensor& x, const Tensor& context, const CrossAttentionWeights& w, int64_t heads) {
    if (x.rank() != 2 || context.rank() != 2) throw ShapeError("cross_attention expects 2-d inputs");
    const int64_t d = w.wq.extent(0);
    if (w.wk.extent(0) != d || w.wv.extent(0) != d) {
        throw ShapeError("cross_attention projections disagree on d");
    }
    if (w.wq.extent(1) != x.extent(1)) {
        throw ShapeError("Wq is " + shape_str(w.wq.shape()) + " but queries have width " +
                         std::to_string(x.extent(1)));
    }
    if (w.wk.extent(1) != context.extent(1) || w.wv.extent(1) != context.extent(1)) {
        throw ShapeError("Wk/Wv width does not match the context rows");
    }
    if (heads < 1 || d % heads != 0) throw ShapeError("cross_attention: d not divisible by heads");

    Tensor q = matmul_nt(x, w.wq);       // [N x d]
    Tensor k = matmul_nt(context, w.wk); // [M x d]
    Tensor v = matmul_nt(context, w.wv); // [M x d]
    const int64_t dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Tensor out;
    for (int64_t h = 0; h < heads; ++h) {
        Tensor qh = heads == 1 ? q : slice(q, 1, h * dh, dh);
        Tensor kh = heads == 1 ? k : slice(k, 1, h * dh, dh);
        Tensor vh = heads == 1 ? v : slice(v, 1, h * dh, dh);
        Tensor att = softmax(affine(matmul_nt(qh, kh), scale, 0.0), 1);
        Tensor oh = matmul(att, vh);
        out = h == 0 ? oh : concat(out, oh, 1);
    }
    return out;
}

} // namespace eegdiff
