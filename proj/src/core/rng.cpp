#include "core/rng.hpp"

#include <cmath>

namespace eegdiff {

namespace {
// splitmix64 finalizer
uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
} // namespace

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    return splitmix(splitmix(seed) ^ splitmix(stream + 0x632be59bd9b4e019ull));
}

uint64_t mix_seed(uint64_t seed, const std::string& label) {
    // FNV-1a over the label, then mixed with the seed
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return mix_seed(seed, h);
}

int64_t Rng::uniform_int(int64_t n) {
    // rejection sampling to avoid modulo bias
    uint64_t un = static_cast<uint64_t>(n);
    uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<int64_t>(x % un);
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

} // namespace eegdiff
