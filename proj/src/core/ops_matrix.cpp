#include "core/gemm.hpp"
#include "core/ops_util.hpp"

namespace eegdiff {

using detail::check_rank;
using detail::record;
using detail::want_tape;

namespace {

Tensor gemm_tensor(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b, const char* op) {
    const int64_t m = trans_a ? a.extent(1) : a.extent(0);
    const int64_t ka = trans_a ? a.extent(0) : a.extent(1);
    const int64_t kb = trans_b ? b.extent(1) : b.extent(0);
    const int64_t n = trans_b ? b.extent(0) : b.extent(1);
    if (ka != kb) {
        throw ShapeError(std::string(op) + ": inner extents mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
    std::vector<double> d(static_cast<size_t>(m * n));
    gemm(a.data().data(), b.data().data(), d.data(), m, ka, n, trans_a, trans_b);
    return Tensor::op_result({m, n}, std::move(d), op);
}

} // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    check_rank("matmul", a, 2);
    check_rank("matmul", b, 2);
    Tensor out = gemm_tensor(a, b, false, false, "matmul");
    if (want_tape({&a, &b})) {
        record(out, [a, b](const Tensor& g, GradMap& sink) {
            if (a.grad_path()) sink.accumulate(a, gemm_tensor(g, b, false, true, "matmul_grad_a"));
            if (b.grad_path()) sink.accumulate(b, gemm_tensor(a, g, true, false, "matmul_grad_b"));
        });
    }
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    check_rank("matmul_nt", a, 2);
    check_rank("matmul_nt", b, 2);
    Tensor out = gemm_tensor(a, b, false, true, "matmul_nt");
    if (want_tape({&a, &b})) {
        record(out, [a, b](const Tensor& g, GradMap& sink) {
            if (a.grad_path()) sink.accumulate(a, gemm_tensor(g, b, false, false, "matmul_nt_grad_a"));
            if (b.grad_path()) sink.accumulate(b, gemm_tensor(g, a, true, false, "matmul_nt_grad_b"));
        });
    }
    return out;
}

Tensor transpose(const Tensor& x) {
    check_rank("transpose", x, 2);
    const int64_t r = x.extent(0), c = x.extent(1);
    std::vector<double> d(static_cast<size_t>(r * c));
    const auto& px = x.data();
    for (int64_t i = 0; i < r; ++i)
        for (int64_t j = 0; j < c; ++j) d[static_cast<size_t>(j * r + i)] = px[static_cast<size_t>(i * c + j)];
    Tensor out = Tensor::op_result({c, r}, std::move(d), "transpose");
    if (want_tape({&x})) {
        record(out, [x](const Tensor& g, GradMap& sink) { sink.accumulate(x, transpose(g)); });
    }
    return out;
}

Tensor reshape(const Tensor& x, const Shape& shape) {
    if (shape_numel(shape) != x.numel()) {
        throw ShapeError("reshape: element count mismatch " + shape_str(x.shape()) + " -> " + shape_str(shape));
    }
    Tensor out = Tensor::op_result(shape, x.data(), "reshape");
    if (want_tape({&x})) {
        record(out, [x](const Tensor& g, GradMap& sink) { sink.accumulate(x, reshape(g, x.shape())); });
    }
    return out;
}

Tensor sum(const Tensor& x) {
    double s = 0.0;
    for (double v : x.data()) s += v;
    Tensor out = Tensor::op_result({1}, {s}, "sum");
    if (want_tape({&x})) {
        record(out, [x](const Tensor& g, GradMap& sink) {
            sink.accumulate(x, Tensor::full(x.shape(), g.item()));
        });
    }
    return out;
}

Tensor mean(const Tensor& x) {
    double s = 0.0;
    for (double v : x.data()) s += v;
    const double inv = 1.0 / static_cast<double>(x.numel());
    Tensor out = Tensor::op_result({1}, {s * inv}, "mean");
    if (want_tape({&x})) {
        record(out, [x, inv](const Tensor& g, GradMap& sink) {
            sink.accumulate(x, Tensor::full(x.shape(), g.item() * inv));
        });
    }
    return out;
}

Tensor mean_rows(const Tensor& x) {
    check_rank("mean_rows", x, 2);
    const int64_t n = x.extent(0), d = x.extent(1);
    std::vector<double> out_d(static_cast<size_t>(d), 0.0);
    const auto& px = x.data();
    for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < d; ++j) out_d[static_cast<size_t>(j)] += px[static_cast<size_t>(i * d + j)];
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : out_d) v *= inv;
    Tensor out = Tensor::op_result({1, d}, std::move(out_d), "mean_rows");
    if (want_tape({&x})) {
        record(out, [x, n, d, inv](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(static_cast<size_t>(n * d));
            const auto& pg = g.data();
            for (int64_t i = 0; i < n; ++i)
                for (int64_t j = 0; j < d; ++j)
                    gd[static_cast<size_t>(i * d + j)] = pg[static_cast<size_t>(j)] * inv;
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "mean_rows_grad"));
        });
    }
    return out;
}

Tensor slice(const Tensor& x, int axis, int64_t start, int64_t len) {
    check_rank("slice", x, 2);
    if (axis != 0 && axis != 1) throw ShapeError("slice: axis must be 0 or 1");
    const int64_t r = x.extent(0), c = x.extent(1);
    const int64_t ext = axis == 0 ? r : c;
    if (start < 0 || len <= 0 || start + len > ext) {
        throw ShapeError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + len) +
                         ") out of bounds for extent " + std::to_string(ext));
    }
    Shape os = axis == 0 ? Shape{len, c} : Shape{r, len};
    std::vector<double> d(static_cast<size_t>(shape_numel(os)));
    const auto& px = x.data();
    if (axis == 0) {
        std::copy(px.begin() + start * c, px.begin() + (start + len) * c, d.begin());
    } else {
        for (int64_t i = 0; i < r; ++i)
            std::copy(px.begin() + i * c + start, px.begin() + i * c + start + len, d.begin() + i * len);
    }
    Tensor out = Tensor::op_result(os, std::move(d), "slice");
    if (want_tape({&x})) {
        record(out, [x, axis, start, len, r, c](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(static_cast<size_t>(r * c), 0.0);
            const auto& pg = g.data();
            if (axis == 0) {
                std::copy(pg.begin(), pg.end(), gd.begin() + start * c);
            } else {
                for (int64_t i = 0; i < r; ++i)
                    std::copy(pg.begin() + i * len, pg.begin() + (i + 1) * len, gd.begin() + i * c + start);
            }
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "slice_grad"));
        });
    }
    return out;
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
    check_rank("concat", a, 2);
    check_rank("concat", b, 2);
    if (axis != 0 && axis != 1) throw ShapeError("concat: axis must be 0 or 1");
    const int other = 1 - axis;
    if (a.extent(other) != b.extent(other)) {
        throw ShapeError("concat: shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()) +
                         " disagree off-axis");
    }
    Shape os = a.shape();
    os[axis] += b.extent(axis);
    std::vector<double> d(static_cast<size_t>(shape_numel(os)));
    const auto& pa = a.data();
    const auto& pb = b.data();
    if (axis == 0) {
        std::copy(pa.begin(), pa.end(), d.begin());
        std::copy(pb.begin(), pb.end(), d.begin() + pa.size());
    } else {
        const int64_t r = a.extent(0), ca = a.extent(1), cb = b.extent(1);
        for (int64_t i = 0; i < r; ++i) {
            std::copy(pa.begin() + i * ca, pa.begin() + (i + 1) * ca, d.begin() + i * (ca + cb));
            std::copy(pb.begin() + i * cb, pb.begin() + (i + 1) * cb, d.begin() + i * (ca + cb) + ca);
        }
    }
    Tensor out = Tensor::op_result(os, std::move(d), "concat");
    if (want_tape({&a, &b})) {
        const int64_t split = a.extent(axis);
        record(out, [a, b, axis, split](const Tensor& g, GradMap& sink) {
            if (a.grad_path()) sink.accumulate(a, slice(g, axis, 0, split));
            if (b.grad_path()) sink.accumulate(b, slice(g, axis, split, g.extent(axis) - split));
        });
    }
    return out;
}

Tensor gather_rows(const Tensor& x, const std::vector<int64_t>& idx) {
    check_rank("gather_rows", x, 2);
    if (idx.empty()) throw ShapeError("gather_rows: empty index list");
    const int64_t r = x.extent(0), c = x.extent(1);
    for (int64_t i : idx) {
        if (i < 0 || i >= r) throw ShapeError("gather_rows: index " + std::to_string(i) + " out of range");
    }
    std::vector<double> d(idx.size() * static_cast<size_t>(c));
    const auto& px = x.data();
    for (size_t k = 0; k < idx.size(); ++k)
        std::copy(px.begin() + idx[k] * c, px.begin() + (idx[k] + 1) * c, d.begin() + static_cast<int64_t>(k) * c);
    Tensor out = Tensor::op_result({static_cast<int64_t>(idx.size()), c}, std::move(d), "gather_rows");
    if (want_tape({&x})) {
        record(out, [x, idx, r, c](const Tensor& g, GradMap& sink) {
            std::vector<double> gd(static_cast<size_t>(r * c), 0.0);
            const auto& pg = g.data();
            for (size_t k = 0; k < idx.size(); ++k) {
                const int64_t row = idx[k];
                for (int64_t j = 0; j < c; ++j)
                    gd[static_cast<size_t>(row * c + j)] += pg[k * static_cast<size_t>(c) + static_cast<size_t>(j)];
            }
            sink.accumulate(x, Tensor::op_result(x.shape(), std::move(gd), "gather_rows_grad"));
        });
    }
    return out;
}

} // namespace eegdiff
