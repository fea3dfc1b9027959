#include "core/adam.hpp"

#include <cmath>

namespace eegdiff {

void adam_step(Tensor& param, const Tensor& grad, AdamSlot& state, int64_t step, const AdamConfig& cfg) {
    if (param.shape() != grad.shape()) {
        throw ShapeError("adam_step: gradient shape " + shape_str(grad.shape()) + " vs parameter shape " +
                         shape_str(param.shape()));
    }
    const size_t n = static_cast<size_t>(param.numel());
    if (state.m.empty()) {
        state.m.assign(n, 0.0);
        state.v.assign(n, 0.0);
    }
    if (state.m.size() != n || state.v.size() != n) {
        throw ShapeError("adam_step: optimizer state size mismatch");
    }
    if (step < 1) throw Error("adam_step: step counter must be >= 1");

    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    const bool round = precision() == Precision::F32;
    auto& p = param.mutable_data();
    const auto& g = grad.data();
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(g[i])) throw NumericError("adam_step: non-finite gradient");
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        if (round) {
            state.m[i] = static_cast<double>(static_cast<float>(state.m[i]));
            state.v[i] = static_cast<double>(static_cast<float>(state.v[i]));
        }
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    param.seal("adam_step");
}

void Adam::step(ParamSet& params, const GradMap& grads) {
    ++step_;
    for (auto& [name, p] : params.entries()) {
        if (!p.trainable) continue;
        const Tensor* g = grads.find(p.tensor);
        if (!g) continue;
        adam_step(p.tensor, *g, slots_[name], step_, cfg_);
    }
}

} // namespace eegdiff
