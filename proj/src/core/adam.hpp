#pragma once

#include <map>

#include "core/params.hpp"
#include "core/tape.hpp"

namespace eegdiff {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamSlot {
    std::vector<double> m;
    std::vector<double> v;
};

// One bias-corrected Adam update of a single parameter, in place.
// step counts from 1.
void adam_step(Tensor& param, const Tensor& grad, AdamSlot& state, int64_t step, const AdamConfig& cfg);

// Optimizer over a ParamSet: visits trainable parameters in name order, so a
// rerun with the same seed replays bit-identically.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    // Applies one update using grads; parameters without a gradient entry are
    // left untouched.
    void step(ParamSet& params, const GradMap& grads);

    int64_t steps_taken() const { return step_; }
    AdamConfig& config() { return cfg_; }

private:
    AdamConfig cfg_;
    std::map<std::string, AdamSlot> slots_;
    int64_t step_ = 0;
};

} // namespace eegdiff
