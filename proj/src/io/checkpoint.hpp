#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/params.hpp"

namespace eegdiff {

// Checkpoint container, little-endian:
//   magic "DDCK", u16 version = 1,
//   u32 meta length, UTF-8 JSON meta, u32 meta crc32,
//   u32 tensor count, then per tensor:
//     u32 name length, name, u8 dtype (0 = f32, 1 = f64), u8 trainable,
//     u32 rank, u32 extents[rank], payload, u32 record crc32
// The CRCs exist so corrupted files are always detected rather than loaded.

struct CheckpointTensor {
    std::string name;
    uint8_t dtype = 0;
    bool trainable = true;
    Shape shape;
    std::vector<double> values;
};

struct Checkpoint {
    nlohmann::json meta; // stage tag, root seed, config snapshot
    std::vector<CheckpointTensor> tensors;

    const CheckpointTensor* find(const std::string& name) const;
    bool has(const std::string& name) const { return find(name) != nullptr; }
};

// Snapshot of a ParamSet; dtype follows the active precision mode.
Checkpoint make_checkpoint(const ParamSet& params, const std::string& stage, uint64_t seed,
                           const nlohmann::json& config);

// Writes checkpoint tensors into matching registry entries in place.
// Validates every shape; flags are copied onto the registry entries.
void load_into(const Checkpoint& ckpt, ParamSet& params);

std::vector<uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace eegdiff
