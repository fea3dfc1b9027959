#include <cmath>

#include "core/ops_util.hpp"

namespace eegdiff {

using detail::check_same_shape;
using detail::record;
using detail::want_tape;

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape("add", a, b);
    std::vector<double> d(a.numel());
    const auto& pa = a.data();
    const auto& pb = b.data();
    for (size_t i = 0; i < d.size(); ++i) d[i] = pa[i] + pb[i];
    Tensor out = Tensor::op_result(a.shape(), std::move(d), "add");
    if (want_tape({&a, &b})) {
        record(out, [a, b](const Tensor& g, GradMap& sink) {
            if (a.grad_path()) sink.accumulate(a, g);
            if (b.grad_path()) sink.accumulate(b, g);
        });
    }
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape("sub", a, b);
    std::vector<double> d(a.numel());
    const auto& pa = a.data();
    const auto& pb = b.data();
    for (size_t i = 0; i < d.size(); ++i) d[i] = pa[i] - pb[i];
    Tensor out = Tensor::op_result(a.shape(), std::move(d), "sub");
    if (want_tape({&a, &b})) {
        record(out, [a, b](const Tensor& g, GradMap& sink) {
            if (a.grad_path()) sink.accumulate(a, g);
            if (b.grad_path()) sink.accumulate(b, affine(g, -1.0, 0.0));
        });
    }
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape("mul", a, b);
    std::vector<double> d(a.numel());
    const auto& pa = a.data();
    const auto& pb = b.data();
    for (size_t i = 0; i < d.size(); ++i) d[i] = pa[i] * pb[i];
    Tensor out = Tensor::op_result(a.shape(), std::move(d), "mul");
    if (want_tape({&a, &b})) {
        record(out, [a, b](const Tensor& g, GradMap& sink) {
            if (a.grad_path()) sink.accumulate(a, mul(g, b));
            if (b.grad_path()) sink.accumulate(b, mul(g, a));
        });
    }
    return out;
}

Tensor affine(const Tensor& x, double scale, double shift) {
    std::vector<double> d(x.numel());
    const auto& px = x.data();
    for (size_t i = 0; i < d.size(); ++i) d[i] = scale * px[i] + shift;
    Tensor out = Tensor::op_result(x.shape(), std::move(d), "affine");
    if (want_tape({&x})) {
        record(out, [x, scale](const Tensor& g, GradMap& sink) {
            sink.accumulate(x, affine(g, scale, 0.0));
        });
    }
    return out;
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
} // namespace

Tensor gelu(const Tensor& x) {
    std::vector<double> d(x.numel());
    const auto& px = x.data();
    for (size_t i = 0; i < d.size(); ++i) {
        d[i] = 0.5 * px[i] * (1.0 + std::erf(px[i] * kInvSqrt2));
    }
    Tensor out = Tensor::op_result(x.shape(), std::move(d), "gelu");
    if (want_tape({&x})) {
        record(out, [x](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(x.numel());
            const auto& px = x.data();
            const auto& pg = g.data();
            for (size_t i = 0; i < gd.size(); ++i) {
                double cdf = 0.5 * (1.0 + std::erf(px[i] * kInvSqrt2));
                double pdf = kInvSqrt2Pi * std::exp(-0.5 * px[i] * px[i]);
                gd[i] = pg[i] * (cdf + px[i] * pdf);
            }
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "gelu_grad"));
        });
    }
    return out;
}

Tensor sigmoid(const Tensor& x) {
    std::vector<double> d(x.numel());
    const auto& px = x.data();
    for (size_t i = 0; i < d.size(); ++i) {
        d[i] = px[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-px[i]))
                            : std::exp(px[i]) / (1.0 + std::exp(px[i]));
    }
    Tensor out = Tensor::op_result(x.shape(), std::move(d), "sigmoid");
    if (want_tape({&x})) {
        record(out, [x, out](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(x.numel());
            const auto& py = out.data();
            const auto& pg = g.data();
            for (size_t i = 0; i < gd.size(); ++i) gd[i] = pg[i] * py[i] * (1.0 - py[i]);
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "sigmoid_grad"));
        });
    }
    return out;
}

Tensor tanh(const Tensor& x) {
    std::vector<double> d(x.numel());
    const auto& px = x.data();
    for (size_t i = 0; i < d.size(); ++i) d[i] = std::tanh(px[i]);
    Tensor out = Tensor::op_result(x.shape(), std::move(d), "tanh");
    if (want_tape({&x})) {
        record(out, [x, out](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(x.numel());
            const auto& py = out.data();
            const auto& pg = g.data();
            for (size_t i = 0; i < gd.size(); ++i) gd[i] = pg[i] * (1.0 - py[i] * py[i]);
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "tanh_grad"));
        });
    }
    return out;
}

} // namespace eegdiff
