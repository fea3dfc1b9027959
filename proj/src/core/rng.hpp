#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace eegdiff {

// Counter-based seed derivation: every stage and every per-sample stream is a
// pure function of the root seed, so reruns are byte-identical and per-sample
// work could be farmed out without sharing generator state.
uint64_t mix_seed(uint64_t seed, uint64_t stream);
uint64_t mix_seed(uint64_t seed, const std::string& label);

// Deterministic generator. mt19937_64 output is fully specified by the
// standard; uniform/normal transforms are implemented here rather than with
// std distributions, which are implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    int64_t uniform_int(int64_t n);

    // standard normal via Box-Muller (cached second value)
    double normal();

    Rng derive(uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }
    Rng derive(const std::string& label) const { return Rng(mix_seed(seed_, label)); }

    uint64_t seed() const { return seed_; }

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

} // namespace eegdiff
