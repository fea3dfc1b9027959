#pragma once

#include <map>
#include <string>

#include "core/tensor.hpp"

namespace eegdiff {

struct Param {
    Tensor tensor;
    bool trainable = true;
};

// Named parameters in deterministic (name) order. Models register their
// tensors here; the registry and the model share storage, so in-place
// optimizer updates and checkpoint loads are visible to both.
class ParamSet {
public:
    Tensor add(const std::string& name, Tensor t, bool trainable = true);

    bool contains(const std::string& name) const { return params_.count(name) != 0; }
    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;

    std::map<std::string, Param>& entries() { return params_; }
    const std::map<std::string, Param>& entries() const { return params_; }

    void set_trainable(const std::string& name, bool trainable) { at(name).trainable = trainable; }
    void set_all_trainable(bool trainable);
    // Applies to every name starting with prefix; returns how many matched.
    size_t set_trainable_prefix(const std::string& prefix, bool trainable);

    int64_t total_elements() const;
    size_t size() const { return params_.size(); }

    // Registers every entry of other under "prefix." names.
    void absorb(const std::string& prefix, const ParamSet& other);

private:
    std::map<std::string, Param> params_;
};

// Weight init helpers.
Tensor glorot_uniform(const Shape& shape, int64_t fan_in, int64_t fan_out, Rng& rng);

} // namespace eegdiff
