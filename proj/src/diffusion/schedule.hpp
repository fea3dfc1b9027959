#pragma once

#include "core/ops.hpp"
#include "core/rng.hpp"

namespace eegdiff {

// DDPM noise schedule; t indexes 1..T, alpha_bar(0) is defined as 1.
struct DiffusionSchedule {
    int64_t timesteps = 0;
    std::vector<double> beta;      // beta[t-1] for step t
    std::vector<double> alpha_bar; // cumulative products

    double beta_at(int64_t t) const;
    double alpha_bar_at(int64_t t) const; // alpha_bar_at(0) == 1
};

// Linear beta interpolation between beta_start and beta_end.
DiffusionSchedule make_schedule(int64_t timesteps, double beta_start, double beta_end);

// z_t = sqrt(alpha_bar_t) * z0 + sqrt(1 - alpha_bar_t) * eps
Tensor q_sample(const Tensor& z0, int64_t t, const Tensor& eps, const DiffusionSchedule& schedule);

} // namespace eegdiff
