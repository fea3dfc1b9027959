#pragma once

#include <functional>
#include <vector>

#include "core/adam.hpp"
#include "core/ops.hpp"
#include "core/precision.hpp"

namespace eegdiff::testing {

// Central finite differences against tape gradients. Callers run this under
// Precision::F64. Per-element relative error uses a small floor so that
// structurally-zero gradients compare against FD rounding noise sanely.
struct FdResult {
    double max_rel_err = 0.0;
    size_t checked = 0;
};

inline FdResult fd_check(const std::function<Tensor(const std::vector<Tensor>&)>& fn,
                         std::vector<Tensor> inputs, double h = 1e-5) {
    FdResult res;
    GradMap grads;
    {
        Tape tape;
        Tensor loss = fn(inputs);
        grads = tape.backward(loss);
    }
    for (Tensor& in : inputs) {
        if (!in.requires_grad()) continue;
        const Tensor* g = grads.find(in);
        for (int64_t i = 0; i < in.numel(); ++i) {
            const double orig = in.data()[static_cast<size_t>(i)];
            in.mutable_data()[static_cast<size_t>(i)] = orig + h;
            const double fp = fn(inputs).item();
            in.mutable_data()[static_cast<size_t>(i)] = orig - h;
            const double fm = fn(inputs).item();
            in.mutable_data()[static_cast<size_t>(i)] = orig;
            const double numeric = (fp - fm) / (2.0 * h);
            const double analytic = g ? g->data()[static_cast<size_t>(i)] : 0.0;
            const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-4});
            res.max_rel_err = std::max(res.max_rel_err, std::abs(numeric - analytic) / denom);
            ++res.checked;
        }
    }
    return res;
}

} // namespace eegdiff::testing
