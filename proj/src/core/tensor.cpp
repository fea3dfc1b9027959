#include "core/tensor.hpp"

#include <atomic>
#include <cmath>

namespace eegdiff {

namespace {
std::atomic<uint64_t> g_next_id{1};
}

Tensor Tensor::make(const Shape& shape, std::vector<double> data, bool requires_grad) {
    for (int64_t e : shape) {
        if (e <= 0) throw ShapeError("tensor extent must be positive, got shape " + shape_str(shape));
    }
    if (static_cast<int64_t>(data.size()) != shape_numel(shape)) {
        throw ShapeError("data length " + std::to_string(data.size()) + " does not match shape " + shape_str(shape));
    }
    Tensor t;
    t.impl_ = std::make_shared<TensorImpl>();
    t.impl_->shape = shape;
    t.impl_->data = std::move(data);
    t.impl_->requires_grad = requires_grad;
    t.impl_->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    return t;
}

Tensor Tensor::zeros(const Shape& shape, bool requires_grad) {
    return make(shape, std::vector<double>(shape_numel(shape), 0.0), requires_grad);
}

Tensor Tensor::full(const Shape& shape, double value, bool requires_grad) {
    Tensor t = make(shape, std::vector<double>(shape_numel(shape), value), requires_grad);
    t.seal("full");
    return t;
}

Tensor Tensor::from_data(const Shape& shape, std::vector<double> data, bool requires_grad) {
    Tensor t = make(shape, std::move(data), requires_grad);
    t.seal("from_data");
    return t;
}

Tensor Tensor::scalar(double value) {
    return from_data({1}, {value});
}

Tensor Tensor::op_result(const Shape& shape, std::vector<double> data, const char* op_name) {
    Tensor t = make(shape, std::move(data), false);
    t.seal(op_name);
    return t;
}

Tensor Tensor::randn(const Shape& shape, Rng& rng, double stddev, bool requires_grad) {
    std::vector<double> d(shape_numel(shape));
    for (double& v : d) v = stddev * rng.normal();
    Tensor t = make(shape, std::move(d), requires_grad);
    t.seal("randn");
    return t;
}

Tensor Tensor::uniform(const Shape& shape, Rng& rng, double lo, double hi, bool requires_grad) {
    std::vector<double> d(shape_numel(shape));
    for (double& v : d) v = rng.uniform(lo, hi);
    Tensor t = make(shape, std::move(d), requires_grad);
    t.seal("uniform");
    return t;
}

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item() on non-scalar tensor of shape " + shape_str(shape()));
    return impl_->data[0];
}

double Tensor::at(std::initializer_list<int64_t> idx) const {
    if (idx.size() != rank()) throw ShapeError("index rank mismatch");
    int64_t off = 0;
    size_t a = 0;
    for (int64_t i : idx) {
        if (i < 0 || i >= impl_->shape[a]) throw ShapeError("index out of range");
        off = off * impl_->shape[a] + i;
        ++a;
    }
    return impl_->data[static_cast<size_t>(off)];
}

Tensor& Tensor::set_requires_grad(bool v) {
    impl_->requires_grad = v;
    return *this;
}

void Tensor::seal(const char* op_name) {
    const bool round = precision() == Precision::F32;
    for (double& v : impl_->data) {
        if (round) v = static_cast<double>(static_cast<float>(v));
        if (!std::isfinite(v)) {
            throw NumericError(std::string(op_name) + " produced a non-finite value");
        }
    }
}

} // namespace eegdiff
