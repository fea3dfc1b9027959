#include "core/params.hpp"

#include <cmath>

namespace eegdiff {

Tensor ParamSet::add(const std::string& name, Tensor t, bool trainable) {
    if (params_.count(name)) throw Error("duplicate parameter name: " + name);
    t.set_requires_grad(trainable);
    params_.emplace(name, Param{t, trainable});
    return t;
}

Param& ParamSet::at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + name);
    return it->second;
}

const Param& ParamSet::at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + name);
    return it->second;
}

void ParamSet::set_all_trainable(bool trainable) {
    for (auto& [name, p] : params_) {
        p.trainable = trainable;
        p.tensor.set_requires_grad(trainable);
    }
}

size_t ParamSet::set_trainable_prefix(const std::string& prefix, bool trainable) {
    size_t n = 0;
    for (auto& [name, p] : params_) {
        if (name.rfind(prefix, 0) == 0) {
            p.trainable = trainable;
            p.tensor.set_requires_grad(trainable);
            ++n;
        }
    }
    return n;
}

int64_t ParamSet::total_elements() const {
    int64_t n = 0;
    for (const auto& [name, p] : params_) n += p.tensor.numel();
    return n;
}

void ParamSet::absorb(const std::string& prefix, const ParamSet& other) {
    for (const auto& [name, p] : other.params_) {
        add(prefix + "." + name, p.tensor, p.trainable);
    }
}

Tensor glorot_uniform(const Shape& shape, int64_t fan_in, int64_t fan_out, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    return Tensor::uniform(shape, rng, -bound, bound);
}

} // namespace eegdiff
