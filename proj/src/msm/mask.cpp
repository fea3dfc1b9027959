#include "msm/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace eegdiff {

bool MaskPlan::is_masked(int64_t pos) const {
    return std::binary_search(masked.begin(), masked.end(), pos);
}

void MaskPlan::validate() const {
    if (n_tokens < 2) throw ShapeError("mask plan needs at least 2 tokens");
    if (masked.empty() || visible.empty()) {
        throw ShapeError("mask plan must leave both masked and visible tokens non-empty");
    }
    if (static_cast<int64_t>(masked.size() + visible.size()) != n_tokens) {
        throw ShapeError("mask plan does not partition the token range");
    }
    std::unordered_set<int64_t> seen;
    for (int64_t i : masked) {
        if (i < 0 || i >= n_tokens || !seen.insert(i).second) {
            throw ShapeError("mask plan has an out-of-range or duplicate masked index");
        }
    }
    for (int64_t i : visible) {
        if (i < 0 || i >= n_tokens || !seen.insert(i).second) {
            throw ShapeError("mask plan has an out-of-range or duplicate visible index");
        }
    }
}

MaskPlan sample_mask(int64_t n_tokens, double mask_ratio, Rng& rng) {
    if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) {
        throw ShapeError("mask ratio must lie in (0, 1)");
    }
    const int64_t k = static_cast<int64_t>(std::floor(mask_ratio * static_cast<double>(n_tokens)));
    if (k < 1) throw ShapeError("mask ratio yields an empty masked set");
    if (k >= n_tokens) throw ShapeError("mask ratio yields an empty visible set");
    std::vector<int64_t> order(static_cast<size_t>(n_tokens));
    std::iota(order.begin(), order.end(), 0);
    for (int64_t i = 0; i < k; ++i) {
        const int64_t j = i + rng.uniform_int(n_tokens - i);
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    MaskPlan plan;
    plan.n_tokens = n_tokens;
    plan.mask_ratio = mask_ratio;
    plan.masked.assign(order.begin(), order.begin() + k);
    std::sort(plan.masked.begin(), plan.masked.end());
    plan.visible.reserve(static_cast<size_t>(n_tokens - k));
    for (int64_t i = 0; i < n_tokens; ++i) {
        if (!std::binary_search(plan.masked.begin(), plan.masked.end(), i)) plan.visible.push_back(i);
    }
    plan.validate();
    return plan;
}

} // namespace eegdiff
