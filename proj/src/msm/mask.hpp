#pragma once

#include <vector>

#include "core/rng.hpp"
#include "core/common.hpp"

namespace eegdiff {

// Which token positions are hidden. |masked| = floor(mask_ratio * n_tokens);
// both sets are non-empty. visible keeps the order encode() will process.
struct MaskPlan {
    int64_t n_tokens = 0;
    double mask_ratio = 0.0;
    std::vector<int64_t> masked;
    std::vector<int64_t> visible;

    bool is_masked(int64_t pos) const;
    void validate() const;
};

// Uniform sample without replacement; call once per sequence per step.
MaskPlan sample_mask(int64_t n_tokens, double mask_ratio, Rng& rng);

} // namespace eegdiff
