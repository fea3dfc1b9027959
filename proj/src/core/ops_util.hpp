#pragma once

#include <initializer_list>

#include "core/ops.hpp"

namespace eegdiff {
namespace detail {

inline bool want_tape(std::initializer_list<const Tensor*> ins) {
    if (!Tape::active()) return false;
    for (const Tensor* t : ins)
        if (t->grad_path()) return true;
    return false;
}

inline void record(Tensor& out, BackwardFn fn) {
    out.mark_grad_path();
    Tape::active()->record(out, std::move(fn));
}

inline void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
}

inline void check_rank(const char* op, const Tensor& t, size_t rank) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                         shape_str(t.shape()));
    }
}

} // namespace detail
} // namespace eegdiff
