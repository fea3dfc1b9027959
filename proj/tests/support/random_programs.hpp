#pragma once

#include <functional>
#include <vector>

#include "core/ops.hpp"
#include "core/rng.hpp"

namespace eegdiff::testing {

// Randomized small differentiable programs covering the whole op set. Each
// program is a deterministic closure over fixed structure; only the tensor
// inputs vary, which is what finite differencing perturbs.
struct Program {
    std::function<Tensor(const std::vector<Tensor>&)> fn;
    std::vector<Tensor> inputs;
    const char* kind;
};

inline Program make_random_program(uint64_t seed) {
    Rng rng(seed);
    const int archetype = static_cast<int>(rng.uniform_int(7));
    auto dim = [&](int64_t lo, int64_t hi) { return lo + rng.uniform_int(hi - lo + 1); };

    switch (archetype) {
    case 0: { // two-layer MLP with layer norm head
        const int64_t n = dim(2, 4), in = dim(2, 5), hid = dim(2, 5), out = dim(2, 4);
        Tensor x = Tensor::randn({n, in}, rng, 1.0, true);
        Tensor w1 = Tensor::randn({hid, in}, rng, 0.6, true);
        Tensor b1 = Tensor::randn({hid}, rng, 0.3, true);
        Tensor w2 = Tensor::randn({out, hid}, rng, 0.6, true);
        Tensor b2 = Tensor::randn({out}, rng, 0.3, true);
        Tensor gamma = Tensor::randn({out}, rng, 0.4, true);
        Tensor beta = Tensor::randn({out}, rng, 0.4, true);
        auto fn = [](const std::vector<Tensor>& v) {
            Tensor h = gelu(linear(v[0], v[1], v[2]));
            Tensor y = layer_norm(linear(h, v[3], v[4]), v[5], v[6]);
            return mean(mul(y, y));
        };
        return {fn, {x, w1, b1, w2, b2, gamma, beta}, "mlp"};
    }
    case 1: { // single-head self-attention block
        const int64_t n = dim(2, 4), d = dim(2, 4);
        Tensor x = Tensor::randn({n, d}, rng, 1.0, true);
        Tensor wq = Tensor::randn({d, d}, rng, 0.7, true);
        Tensor wk = Tensor::randn({d, d}, rng, 0.7, true);
        Tensor wv = Tensor::randn({d, d}, rng, 0.7, true);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d));
        auto fn = [scale](const std::vector<Tensor>& v) {
            Tensor q = matmul_nt(v[0], v[1]);
            Tensor k = matmul_nt(v[0], v[2]);
            Tensor val = matmul_nt(v[0], v[3]);
            Tensor att = softmax(affine(matmul_nt(q, k), scale, 0.0), 1);
            Tensor y = add(v[0], matmul(att, val));
            return mean(mul(y, y));
        };
        return {fn, {x, wq, wk, wv}, "attention"};
    }
    case 2: { // conv1d feature chain
        const int64_t cin = dim(1, 3), len = dim(6, 10), cout = dim(1, 3), k = dim(2, 3);
        const int64_t stride = dim(1, 2);
        Tensor x = Tensor::randn({cin, len}, rng, 1.0, true);
        Tensor kern = Tensor::randn({cout, cin, k}, rng, 0.7, true);
        auto fn = [stride](const std::vector<Tensor>& v) {
            Tensor y = tanh(conv1d(v[0], v[1], stride));
            return mean(mul(y, y));
        };
        return {fn, {x, kern}, "conv1d"};
    }
    case 3: { // conv2d + channel bias + upsample + sigmoid
        const int64_t cin = dim(1, 2), h = dim(3, 5), w = dim(3, 5), cout = dim(1, 3);
        Tensor x = Tensor::randn({cin, h, w}, rng, 1.0, true);
        Tensor kern = Tensor::randn({cout, cin, 3, 3}, rng, 0.5, true);
        Tensor bias = Tensor::randn({cout}, rng, 0.3, true);
        auto fn = [](const std::vector<Tensor>& v) {
            Tensor y = add_channel_bias(conv2d(v[0], v[1], 1, 1), v[2]);
            Tensor u = sigmoid(upsample_nearest2(gelu(y)));
            return mean(u);
        };
        return {fn, {x, kern, bias}, "conv2d"};
    }
    case 4: { // structural: slice/concat/transpose/reshape/gather
        const int64_t n = dim(3, 5), d = dim(4, 6);
        Tensor x = Tensor::randn({n, d}, rng, 1.0, true);
        std::vector<int64_t> idx;
        for (int64_t i = 0; i < n + 1; ++i) idx.push_back(rng.uniform_int(n));
        const int64_t cut = dim(1, d - 1);
        auto fn = [idx, cut](const std::vector<Tensor>& v) {
            Tensor g = gather_rows(v[0], idx);
            Tensor left = slice(g, 1, 0, cut);
            Tensor right = slice(g, 1, cut, g.extent(1) - cut);
            Tensor mixed = matmul(transpose(left), right);
            Tensor flat = reshape(mixed, {mixed.numel()});
            Tensor joined = concat(reshape(flat, {1, mixed.numel()}),
                                   Tensor::full({1, mixed.numel()}, 0.5), 0);
            return sum(mul(joined, joined));
        };
        return {fn, {x}, "structural"};
    }
    case 5: { // embedding + softmax classifier with cross entropy
        const int64_t vocab = dim(4, 7), d = dim(3, 5), n = dim(2, 4), classes = dim(2, 4);
        Tensor table = Tensor::randn({vocab, d}, rng, 0.8, true);
        Tensor w = Tensor::randn({classes, d}, rng, 0.8, true);
        Tensor b = Tensor::randn({classes}, rng, 0.3, true);
        std::vector<int64_t> tokens, labels;
        for (int64_t i = 0; i < n; ++i) tokens.push_back(rng.uniform_int(vocab));
        for (int64_t i = 0; i < n; ++i) labels.push_back(rng.uniform_int(classes));
        auto fn = [tokens, labels](const std::vector<Tensor>& v) {
            Tensor e = embedding(v[0], tokens);
            return cross_entropy(linear(e, v[1], v[2]), labels);
        };
        return {fn, {table, w, b}, "embedding"};
    }
    default: { // pooled cosine-style head: mean_rows + l2_normalize + affine
        const int64_t n = dim(2, 5), d = dim(3, 6);
        Tensor x = Tensor::randn({n, d}, rng, 1.0, true);
        Tensor y = Tensor::randn({1, d}, rng, 1.0, true);
        Tensor w = Tensor::randn({d, d}, rng, 0.6, true);
        auto fn = [](const std::vector<Tensor>& v) {
            Tensor a = l2_normalize(matmul(mean_rows(v[0]), v[2]));
            Tensor b = l2_normalize(v[1]);
            Tensor cosine = sum(mul(a, b));
            Tensor diff = sub(add_rowvec(v[0], reshape(b, {b.numel()})), tanh(v[0]));
            return add(affine(cosine, -1.0, 1.0), mean(mul(diff, diff)));
        };
        return {fn, {x, y, w}, "cosine"};
    }
    }
}

} // namespace eegdiff::testing
