#pragma once

#include <initializer_list>
#include <memory>
#include <vector>

#include "core/common.hpp"
#include "core/precision.hpp"
#include "core/rng.hpp"

namespace eegdiff {

struct TensorImpl {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    bool grad_path = false; // true if a requires_grad leaf feeds this value
    uint64_t id = 0;
};

// Value handle to an immutable n-d array (mutated only by optimizer steps).
// Rank is small and fixed per op; data is row-major. In F32 precision mode
// every stored value is exactly representable as float.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(const Shape& shape, bool requires_grad = false);
    static Tensor full(const Shape& shape, double value, bool requires_grad = false);
    static Tensor from_data(const Shape& shape, std::vector<double> data, bool requires_grad = false);
    static Tensor scalar(double value);
    // from_data variant that reports op_name on non-finite values
    static Tensor op_result(const Shape& shape, std::vector<double> data, const char* op_name);
    static Tensor randn(const Shape& shape, Rng& rng, double stddev = 1.0, bool requires_grad = false);
    static Tensor uniform(const Shape& shape, Rng& rng, double lo, double hi, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    int64_t numel() const { return static_cast<int64_t>(impl_->data.size()); }
    size_t rank() const { return impl_->shape.size(); }
    int64_t extent(size_t axis) const { return impl_->shape[axis]; }

    const std::vector<double>& data() const { return impl_->data; }
    std::vector<double>& mutable_data() { return impl_->data; }

    double item() const;
    double at(std::initializer_list<int64_t> idx) const;

    bool requires_grad() const { return impl_->requires_grad; }
    Tensor& set_requires_grad(bool v);
    bool grad_path() const { return impl_->grad_path || impl_->requires_grad; }
    void mark_grad_path() { impl_->grad_path = true; }

    uint64_t id() const { return impl_->id; }

    // Applies the global precision policy and rejects non-finite values.
    // Every op calls this on its freshly written output.
    void seal(const char* op_name);

private:
    std::shared_ptr<TensorImpl> impl_;

    static Tensor make(const Shape& shape, std::vector<double> data, bool requires_grad);
};

} // namespace eegdiff
