#include "diffusion/schedule.hpp"

#include <cmath>

namespace eegdiff {

double DiffusionSchedule::beta_at(int64_t t) const {
    if (t < 1 || t > timesteps) throw ShapeError("schedule step " + std::to_string(t) + " out of range");
    return beta[static_cast<size_t>(t - 1)];
}

double DiffusionSchedule::alpha_bar_at(int64_t t) const {
    if (t == 0) return 1.0;
    if (t < 1 || t > timesteps) throw ShapeError("schedule step " + std::to_string(t) + " out of range");
    return alpha_bar[static_cast<size_t>(t - 1)];
}

DiffusionSchedule make_schedule(int64_t timesteps, double beta_start, double beta_end) {
    if (timesteps < 1) throw ConfigError("schedule needs at least one step");
    if (!(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0)) {
        throw ConfigError("schedule betas must satisfy 0 < beta_start <= beta_end < 1");
    }
    DiffusionSchedule s;
    s.timesteps = timesteps;
    s.beta.resize(static_cast<size_t>(timesteps));
    s.alpha_bar.resize(static_cast<size_t>(timesteps));
    double prod = 1.0;
    for (int64_t t = 0; t < timesteps; ++t) {
        const double frac = timesteps == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(timesteps - 1);
        const double b = beta_start + (beta_end - beta_start) * frac;
        s.beta[static_cast<size_t>(t)] = b;
        prod *= 1.0 - b;
        s.alpha_bar[static_cast<size_t>(t)] = prod;
    }
    return s;
}

Tensor q_sample(const Tensor& z0, int64_t t, const Tensor& eps, const DiffusionSchedule& schedule) {
    if (z0.shape() != eps.shape()) throw ShapeError("q_sample: noise shape must match the latent");
    if (t < 1 || t > schedule.timesteps) {
        throw ShapeError("q_sample: step " + std::to_string(t) + " out of range 1.." +
                         std::to_string(schedule.timesteps));
    }
    const double ab = schedule.alpha_bar_at(t);
    const double sa = std::sqrt(ab);
    const double sn = std::sqrt(1.0 - ab);
    return add(affine(z0, sa, 0.0), affine(eps, sn, 0.0));
}

} // namespace eegdiff
