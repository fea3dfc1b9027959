#pragma once

#include <cstdint>
#include <vector>

namespace eegdiff {

uint32_t crc32(const uint8_t* data, size_t n, uint32_t seed = 0);

inline uint32_t crc32(const std::vector<uint8_t>& data, uint32_t seed = 0) {
    return crc32(data.data(), data.size(), seed);
}

} // namespace eegdiff
