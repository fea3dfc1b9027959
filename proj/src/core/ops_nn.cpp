#include <algorithm>
#include <cmath>

#include "core/ops_util.hpp"

namespace eegdiff {

using detail::check_rank;
using detail::record;
using detail::want_tape;

namespace {

// Iterates the slices of a 1-d/2-d tensor along `axis`; calls fn(base, stride, len).
template <typename F>
void for_each_lane(const Shape& shape, int axis, F&& fn) {
    if (shape.size() == 1) {
        fn(0, 1, shape[0]);
        return;
    }
    const int64_t r = shape[0], c = shape[1];
    if (axis == 1) {
        for (int64_t i = 0; i < r; ++i) fn(i * c, 1, c);
    } else {
        for (int64_t j = 0; j < c; ++j) fn(j, c, r);
    }
}

} // namespace

Tensor softmax(const Tensor& x, int axis) {
    if (x.rank() != 1 && x.rank() != 2) throw ShapeError("softmax: rank must be 1 or 2");
    if (axis < 0 || axis >= static_cast<int>(x.rank())) throw ShapeError("softmax: invalid axis");
    std::vector<double> d(x.numel());
    const auto& px = x.data();
    for_each_lane(x.shape(), axis, [&](int64_t base, int64_t stride, int64_t len) {
        double mx = px[base];
        for (int64_t i = 1; i < len; ++i) mx = std::max(mx, px[base + i * stride]);
        double z = 0.0;
        for (int64_t i = 0; i < len; ++i) {
            double e = std::exp(px[base + i * stride] - mx);
            d[base + i * stride] = e;
            z += e;
        }
        const double inv = 1.0 / z;
        for (int64_t i = 0; i < len; ++i) d[base + i * stride] *= inv;
    });
    Tensor out = Tensor::op_result(x.shape(), std::move(d), "softmax");
    if (want_tape({&x})) {
        record(out, [x, out, axis](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(x.numel());
            const auto& py = out.data();
            const auto& pg = g.data();
            for_each_lane(x.shape(), axis, [&](int64_t base, int64_t stride, int64_t len) {
                double dot = 0.0;
                for (int64_t i = 0; i < len; ++i) dot += pg[base + i * stride] * py[base + i * stride];
                for (int64_t i = 0; i < len; ++i) {
                    gd[base + i * stride] = py[base + i * stride] * (pg[base + i * stride] - dot);
                }
            });
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "softmax_grad"));
        });
    }
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
    check_rank("layer_norm", x, 2);
    check_rank("layer_norm", gamma, 1);
    check_rank("layer_norm", beta, 1);
    const int64_t n = x.extent(0), d = x.extent(1);
    if (gamma.extent(0) != d || beta.extent(0) != d) {
        throw ShapeError("layer_norm: scale/shift must have extent " + std::to_string(d));
    }
    std::vector<double> out_d(x.numel());
    std::vector<double> xhat(x.numel());
    std::vector<double> inv_std(static_cast<size_t>(n));
    const auto& px = x.data();
    const auto& pgm = gamma.data();
    const auto& pbt = beta.data();
    for (int64_t i = 0; i < n; ++i) {
        const double* row = px.data() + i * d;
        double mu = 0.0;
        for (int64_t j = 0; j < d; ++j) mu += row[j];
        mu /= static_cast<double>(d);
        double var = 0.0;
        for (int64_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
        var /= static_cast<double>(d);
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(i)] = is;
        for (int64_t j = 0; j < d; ++j) {
            const double xh = (row[j] - mu) * is;
            xhat[static_cast<size_t>(i * d + j)] = xh;
            out_d[static_cast<size_t>(i * d + j)] = xh * pgm[static_cast<size_t>(j)] + pbt[static_cast<size_t>(j)];
        }
    }
    Tensor out = Tensor::op_result(x.shape(), std::move(out_d), "layer_norm");
    if (want_tape({&x, &gamma, &beta})) {
        record(out, [x, gamma, beta, xhat, inv_std, n, d](const Tensor& g, GradMap& sink) {
            const auto& pg = g.data();
            const auto& pgm = gamma.data();
            if (x.grad_path()) {
                std::vector<double> gx(x.numel());
                for (int64_t i = 0; i < n; ++i) {
                    const double is = inv_std[static_cast<size_t>(i)];
                    double m1 = 0.0, m2 = 0.0;
                    for (int64_t j = 0; j < d; ++j) {
                        const double dy = pg[i * d + j] * pgm[static_cast<size_t>(j)];
                        m1 += dy;
                        m2 += dy * xhat[static_cast<size_t>(i * d + j)];
                    }
                    m1 /= static_cast<double>(d);
                    m2 /= static_cast<double>(d);
                    for (int64_t j = 0; j < d; ++j) {
                        const double dy = pg[i * d + j] * pgm[static_cast<size_t>(j)];
                        gx[static_cast<size_t>(i * d + j)] =
                            is * (dy - m1 - xhat[static_cast<size_t>(i * d + j)] * m2);
                    }
                }
                sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gx), "layer_norm_grad_x"));
            }
            if (gamma.grad_path()) {
                std::vector<double> gg(static_cast<size_t>(d), 0.0);
                for (int64_t i = 0; i < n; ++i)
                    for (int64_t j = 0; j < d; ++j)
                        gg[static_cast<size_t>(j)] += pg[i * d + j] * xhat[static_cast<size_t>(i * d + j)];
                sink.accumulate(gamma, Tensor::op_result(gamma.shape(), std::move(gg), "layer_norm_grad_gamma"));
            }
            if (beta.grad_path()) {
                std::vector<double> gb(static_cast<size_t>(d), 0.0);
                for (int64_t i = 0; i < n; ++i)
                    for (int64_t j = 0; j < d; ++j) gb[static_cast<size_t>(j)] += pg[i * d + j];
                sink.accumulate(beta, Tensor::op_result(beta.shape(), std::move(gb), "layer_norm_grad_beta"));
            }
        });
    }
    return out;
}

Tensor add_rowvec(const Tensor& x, const Tensor& b) {
    check_rank("add_rowvec", x, 2);
    check_rank("add_rowvec", b, 1);
    const int64_t n = x.extent(0), d = x.extent(1);
    if (b.extent(0) != d) {
        throw ShapeError("add_rowvec: bias extent " + std::to_string(b.extent(0)) + " vs row width " +
                         std::to_string(d));
    }
    std::vector<double> out_d(x.numel());
    const auto& px = x.data();
    const auto& pb = b.data();
    for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < d; ++j)
            out_d[static_cast<size_t>(i * d + j)] = px[static_cast<size_t>(i * d + j)] + pb[static_cast<size_t>(j)];
    Tensor out = Tensor::op_result(x.shape(), std::move(out_d), "add_rowvec");
    if (want_tape({&x, &b})) {
        record(out, [x, b, n, d](const Tensor& g, GradMap& sink) {
            const auto& pg = g.data();
            if (x.grad_path()) sink.accumulate(x, g);
            if (b.grad_path()) {
                std::vector<double> gb(static_cast<size_t>(d), 0.0);
                for (int64_t i = 0; i < n; ++i)
                    for (int64_t j = 0; j < d; ++j) gb[static_cast<size_t>(j)] += pg[i * d + j];
                sink.accumulate(b, Tensor::op_result(b.shape(), std::move(gb), "add_rowvec_grad"));
            }
        });
    }
    return out;
}

Tensor add_channel_bias(const Tensor& x, const Tensor& b) {
    check_rank("add_channel_bias", x, 3);
    check_rank("add_channel_bias", b, 1);
    const int64_t c = x.extent(0), hw = x.extent(1) * x.extent(2);
    if (b.extent(0) != c) throw ShapeError("add_channel_bias: bias extent mismatch");
    std::vector<double> out_d(x.numel());
    const auto& px = x.data();
    const auto& pb = b.data();
    for (int64_t ch = 0; ch < c; ++ch)
        for (int64_t i = 0; i < hw; ++i)
            out_d[static_cast<size_t>(ch * hw + i)] = px[static_cast<size_t>(ch * hw + i)] + pb[static_cast<size_t>(ch)];
    Tensor out = Tensor::op_result(x.shape(), std::move(out_d), "add_channel_bias");
    if (want_tape({&x, &b})) {
        record(out, [x, b, c, hw](const Tensor& g, GradMap& sink) {
            const auto& pg = g.data();
            if (x.grad_path()) sink.accumulate(x, g);
            if (b.grad_path()) {
                std::vector<double> gb(static_cast<size_t>(c), 0.0);
                for (int64_t ch = 0; ch < c; ++ch)
                    for (int64_t i = 0; i < hw; ++i) gb[static_cast<size_t>(ch)] += pg[ch * hw + i];
                sink.accumulate(b, Tensor::op_result(b.shape(), std::move(gb), "add_channel_bias_grad"));
            }
        });
    }
    return out;
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int64_t>& labels) {
    check_rank("cross_entropy", logits, 2);
    const int64_t n = logits.extent(0), k = logits.extent(1);
    if (static_cast<int64_t>(labels.size()) != n) {
        throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) +
                         " rows");
    }
    for (int64_t l : labels) {
        if (l < 0 || l >= k) throw ShapeError("cross_entropy: label " + std::to_string(l) + " out of range");
    }
    const auto& px = logits.data();
    std::vector<double> probs(logits.numel());
    double loss = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const double* row = px.data() + i * k;
        double mx = row[0];
        for (int64_t j = 1; j < k; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int64_t j = 0; j < k; ++j) {
            double e = std::exp(row[j] - mx);
            probs[static_cast<size_t>(i * k + j)] = e;
            z += e;
        }
        const double inv = 1.0 / z;
        for (int64_t j = 0; j < k; ++j) probs[static_cast<size_t>(i * k + j)] *= inv;
        loss -= std::log(probs[static_cast<size_t>(i * k + labels[static_cast<size_t>(i)])]);
    }
    loss /= static_cast<double>(n);
    Tensor out = Tensor::op_result({1}, {loss}, "cross_entropy");
    if (want_tape({&logits})) {
        record(out, [logits, labels, probs, n, k](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(probs);
            const double scale = g.item() / static_cast<double>(n);
            for (int64_t i = 0; i < n; ++i) {
                gd[static_cast<size_t>(i * k + labels[static_cast<size_t>(i)])] -= 1.0;
                for (int64_t j = 0; j < k; ++j) gd[static_cast<size_t>(i * k + j)] *= scale;
            }
            sink.accumulate(logits, Tensor::op_result(logits.shape(), std::move(gd), "cross_entropy_grad"));
        });
    }
    return out;
}

Tensor l2_normalize(const Tensor& x) {
    if (x.rank() > 2 || (x.rank() == 2 && x.extent(0) != 1)) {
        throw ShapeError("l2_normalize: expects a vector shaped [d] or [1 x d]");
    }
    double sq = 0.0;
    for (double v : x.data()) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) throw NumericError("l2_normalize: zero vector");
    const double inv = 1.0 / norm;
    std::vector<double> d(x.numel());
    const auto& px = x.data();
    for (size_t i = 0; i < d.size(); ++i) d[i] = px[i] * inv;
    Tensor out = Tensor::op_result(x.shape(), std::move(d), "l2_normalize");
    if (want_tape({&x})) {
        record(out, [x, out, inv](const Tensor& g, GradMap& sink) {
            const auto& py = out.data();
            const auto& pg = g.data();
            double dot = 0.0;
            for (size_t i = 0; i < py.size(); ++i) dot += pg[i] * py[i];
            std::vector<double> gd(py.size());
            for (size_t i = 0; i < py.size(); ++i) gd[i] = (pg[i] - py[i] * dot) * inv;
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "l2_normalize_grad"));
        });
    }
    return out;
}

} // namespace eegdiff
