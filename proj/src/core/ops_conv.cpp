#include "core/gemm.hpp"
#include "core/ops_util.hpp"

namespace eegdiff {

using detail::check_rank;
using detail::record;
using detail::want_tape;

namespace {

// cols[(Cin*K) x Lout], cols[(c*K + t), j] = x[c, j*stride + t]
std::vector<double> im2col_1d(const std::vector<double>& x, int64_t cin, int64_t len, int64_t k, int64_t stride,
                              int64_t lout) {
    std::vector<double> cols(static_cast<size_t>(cin * k * lout));
    for (int64_t c = 0; c < cin; ++c)
        for (int64_t t = 0; t < k; ++t) {
            const int64_t row = c * k + t;
            for (int64_t j = 0; j < lout; ++j)
                cols[static_cast<size_t>(row * lout + j)] = x[static_cast<size_t>(c * len + j * stride + t)];
        }
    return cols;
}

// cols[(Cin*Kh*Kw) x (Hout*Wout)] with zero padding
std::vector<double> im2col_2d(const std::vector<double>& x, int64_t cin, int64_t h, int64_t w, int64_t kh,
                              int64_t kw, int64_t stride, int64_t pad, int64_t hout, int64_t wout) {
    std::vector<double> cols(static_cast<size_t>(cin * kh * kw * hout * wout), 0.0);
    const int64_t ncols = hout * wout;
    for (int64_t c = 0; c < cin; ++c)
        for (int64_t ki = 0; ki < kh; ++ki)
            for (int64_t kj = 0; kj < kw; ++kj) {
                const int64_t row = (c * kh + ki) * kw + kj;
                for (int64_t oi = 0; oi < hout; ++oi) {
                    const int64_t si = oi * stride + ki - pad;
                    if (si < 0 || si >= h) continue;
                    for (int64_t oj = 0; oj < wout; ++oj) {
                        const int64_t sj = oj * stride + kj - pad;
                        if (sj < 0 || sj >= w) continue;
                        cols[static_cast<size_t>(row * ncols + oi * wout + oj)] =
                            x[static_cast<size_t>((c * h + si) * w + sj)];
                    }
                }
            }
    return cols;
}

} // namespace

Tensor conv1d(const Tensor& x, const Tensor& kernels, int64_t stride) {
    check_rank("conv1d", x, 2);
    check_rank("conv1d", kernels, 3);
    if (stride < 1) throw ShapeError("conv1d: stride must be >= 1");
    const int64_t cin = x.extent(0), len = x.extent(1);
    const int64_t cout = kernels.extent(0), kcin = kernels.extent(1), k = kernels.extent(2);
    if (kcin != cin) throw ShapeError("conv1d: kernel input channels mismatch");
    if (k > len) throw ShapeError("conv1d: kernel length " + std::to_string(k) + " exceeds signal length " +
                                  std::to_string(len));
    const int64_t lout = (len - k) / stride + 1;
    std::vector<double> cols = im2col_1d(x.data(), cin, len, k, stride, lout);
    std::vector<double> out_d(static_cast<size_t>(cout * lout));
    gemm(kernels.data().data(), cols.data(), out_d.data(), cout, cin * k, lout, false, false);
    Tensor out = Tensor::op_result({cout, lout}, std::move(out_d), "conv1d");
    if (want_tape({&x, &kernels})) {
        record(out, [x, kernels, stride, cin, len, cout, k, lout](const Tensor& g, GradMap& sink) {
            const auto& pg = g.data();
            if (kernels.grad_path()) {
                std::vector<double> cols = im2col_1d(x.data(), cin, len, k, stride, lout);
                std::vector<double> gk(static_cast<size_t>(cout * cin * k));
                gemm(pg.data(), cols.data(), gk.data(), cout, lout, cin * k, false, true);
                sink.accumulate(kernels, Tensor::op_result(kernels.shape(), std::move(gk), "conv1d_grad_k"));
            }
            if (x.grad_path()) {
                std::vector<double> gcols(static_cast<size_t>(cin * k * lout));
                gemm(kernels.data().data(), pg.data(), gcols.data(), cin * k, cout, lout, true, false);
                std::vector<double> gx(x.numel(), 0.0);
                for (int64_t c = 0; c < cin; ++c)
                    for (int64_t t = 0; t < k; ++t) {
                        const int64_t row = c * k + t;
                        for (int64_t j = 0; j < lout; ++j)
                            gx[static_cast<size_t>(c * len + j * stride + t)] +=
                                gcols[static_cast<size_t>(row * lout + j)];
                    }
                sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gx), "conv1d_grad_x"));
            }
        });
    }
    return out;
}

Tensor conv2d(const Tensor& x, const Tensor& kernels, int64_t stride, int64_t pad) {
    check_rank("conv2d", x, 3);
    check_rank("conv2d", kernels, 4);
    if (stride < 1 || pad < 0) throw ShapeError("conv2d: invalid stride/pad");
    const int64_t cin = x.extent(0), h = x.extent(1), w = x.extent(2);
    const int64_t cout = kernels.extent(0), kcin = kernels.extent(1), kh = kernels.extent(2), kw = kernels.extent(3);
    if (kcin != cin) throw ShapeError("conv2d: kernel input channels mismatch");
    const int64_t hout = (h + 2 * pad - kh) / stride + 1;
    const int64_t wout = (w + 2 * pad - kw) / stride + 1;
    if (hout <= 0 || wout <= 0) throw ShapeError("conv2d: kernel larger than padded input");
    const int64_t ncols = hout * wout;
    std::vector<double> cols = im2col_2d(x.data(), cin, h, w, kh, kw, stride, pad, hout, wout);
    std::vector<double> out_d(static_cast<size_t>(cout * ncols));
    gemm(kernels.data().data(), cols.data(), out_d.data(), cout, cin * kh * kw, ncols, false, false);
    Tensor out = Tensor::op_result({cout, hout, wout}, std::move(out_d), "conv2d");
    if (want_tape({&x, &kernels})) {
        record(out, [x, kernels, stride, pad, cin, h, w, cout, kh, kw, hout, wout](const Tensor& g,
                                                                                   GradMap& sink) {
            const auto& pg = g.data();
            const int64_t ncols = hout * wout;
            if (kernels.grad_path()) {
                std::vector<double> cols = im2col_2d(x.data(), cin, h, w, kh, kw, stride, pad, hout, wout);
                std::vector<double> gk(static_cast<size_t>(cout * cin * kh * kw));
                gemm(pg.data(), cols.data(), gk.data(), cout, ncols, cin * kh * kw, false, true);
                sink.accumulate(kernels, Tensor::op_result(kernels.shape(), std::move(gk), "conv2d_grad_k"));
            }
            if (x.grad_path()) {
                std::vector<double> gcols(static_cast<size_t>(cin * kh * kw * ncols));
                gemm(kernels.data().data(), pg.data(), gcols.data(), cin * kh * kw, cout, ncols, true, false);
                std::vector<double> gx(x.numel(), 0.0);
                for (int64_t c = 0; c < cin; ++c)
                    for (int64_t ki = 0; ki < kh; ++ki)
                        for (int64_t kj = 0; kj < kw; ++kj) {
                            const int64_t row = (c * kh + ki) * kw + kj;
                            for (int64_t oi = 0; oi < hout; ++oi) {
                                const int64_t si = oi * stride + ki - pad;
                                if (si < 0 || si >= h) continue;
                                for (int64_t oj = 0; oj < wout; ++oj) {
                                    const int64_t sj = oj * stride + kj - pad;
                                    if (sj < 0 || sj >= w) continue;
                                    gx[static_cast<size_t>((c * h + si) * w + sj)] +=
                                        gcols[static_cast<size_t>(row * ncols + oi * wout + oj)];
                                }
                            }
                        }
                sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gx), "conv2d_grad_x"));
            }
        });
    }
    return out;
}

Tensor upsample_nearest2(const Tensor& x) {
    check_rank("upsample_nearest2", x, 3);
    const int64_t c = x.extent(0), h = x.extent(1), w = x.extent(2);
    std::vector<double> d(static_cast<size_t>(c * 4 * h * w));
    const auto& px = x.data();
    for (int64_t ch = 0; ch < c; ++ch)
        for (int64_t i = 0; i < h; ++i)
            for (int64_t j = 0; j < w; ++j) {
                const double v = px[static_cast<size_t>((ch * h + i) * w + j)];
                const int64_t base = (ch * 2 * h + 2 * i) * 2 * w + 2 * j;
                d[static_cast<size_t>(base)] = v;
                d[static_cast<size_t>(base + 1)] = v;
                d[static_cast<size_t>(base + 2 * w)] = v;
                d[static_cast<size_t>(base + 2 * w + 1)] = v;
            }
    Tensor out = Tensor::op_result({c, 2 * h, 2 * w}, std::move(d), "upsample_nearest2");
    if (want_tape({&x})) {
        record(out, [x, c, h, w](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(x.numel());
            const auto& pg = g.data();
            for (int64_t ch = 0; ch < c; ++ch)
                for (int64_t i = 0; i < h; ++i)
                    for (int64_t j = 0; j < w; ++j) {
                        const int64_t base = (ch * 2 * h + 2 * i) * 2 * w + 2 * j;
                        gd[static_cast<size_t>((ch * h + i) * w + j)] =
                            pg[static_cast<size_t>(base)] + pg[static_cast<size_t>(base + 1)] +
                            pg[static_cast<size_t>(base + 2 * w)] + pg[static_cast<size_t>(base + 2 * w + 1)];
                    }
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "upsample_nearest2_grad"));
        });
    }
    return out;
}

} // namespace eegdiff
