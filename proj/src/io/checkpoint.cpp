#include "io/checkpoint.hpp"

#include <cmath>

#include "core/precision.hpp"
#include "io/binary.hpp"
#include "io/crc32.hpp"

namespace eegdiff {

namespace {
constexpr char kMagic[4] = {'D', 'D', 'C', 'K'};
constexpr uint16_t kVersion = 1;
constexpr uint8_t kDtypeF32 = 0;
constexpr uint8_t kDtypeF64 = 1;
} // namespace

const CheckpointTensor* Checkpoint::find(const std::string& name) const {
    for (const CheckpointTensor& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

Checkpoint make_checkpoint(const ParamSet& params, const std::string& stage, uint64_t seed,
                           const nlohmann::json& config) {
    Checkpoint ckpt;
    ckpt.meta = nlohmann::json{{"stage", stage}, {"seed", seed}, {"config", config}, {"format", "eegdiff"}};
    const uint8_t dtype = precision() == Precision::F32 ? kDtypeF32 : kDtypeF64;
    for (const auto& [name, p] : params.entries()) {
        CheckpointTensor t;
        t.name = name;
        t.dtype = dtype;
        t.trainable = p.trainable;
        t.shape = p.tensor.shape();
        t.values = p.tensor.data();
        ckpt.tensors.push_back(std::move(t));
    }
    return ckpt;
}

void load_into(const Checkpoint& ckpt, ParamSet& params) {
    for (const CheckpointTensor& t : ckpt.tensors) {
        if (!params.contains(t.name)) {
            throw FormatError("checkpoint tensor '" + t.name + "' has no matching model parameter");
        }
        Param& p = params.at(t.name);
        if (p.tensor.shape() != t.shape) {
            throw ShapeError("checkpoint tensor '" + t.name + "' has shape " + shape_str(t.shape) +
                             " but the model expects " + shape_str(p.tensor.shape()));
        }
        p.tensor.mutable_data() = t.values;
        p.tensor.seal("load_checkpoint");
        p.trainable = t.trainable;
        p.tensor.set_requires_grad(t.trainable);
    }
}

std::vector<uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
    ByteWriter w;
    w.bytes(kMagic, 4);
    w.u16(kVersion);
    const std::string meta = ckpt.meta.dump();
    w.u32(static_cast<uint32_t>(meta.size()));
    w.str(meta);
    w.u32(crc32(reinterpret_cast<const uint8_t*>(meta.data()), meta.size()));
    w.u32(static_cast<uint32_t>(ckpt.tensors.size()));
    for (const CheckpointTensor& t : ckpt.tensors) {
        ByteWriter rec;
        rec.u32(static_cast<uint32_t>(t.name.size()));
        rec.str(t.name);
        rec.u8(t.dtype);
        rec.u8(t.trainable ? 1 : 0);
        rec.u32(static_cast<uint32_t>(t.shape.size()));
        for (int64_t e : t.shape) rec.u32(static_cast<uint32_t>(e));
        for (double v : t.values) {
            if (t.dtype == kDtypeF32) {
                rec.f32(static_cast<float>(v));
            } else {
                rec.f64(v);
            }
        }
        w.bytes(rec.buffer().data(), rec.size());
        w.u32(crc32(rec.buffer()));
    }
    return w.buffer();
}

Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    if (r.str(4) != std::string(kMagic, 4)) {
        throw FormatError("not a checkpoint file (bad magic)");
    }
    const uint16_t version = r.u16();
    if (version != kVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ckpt;
    const uint32_t meta_len = r.u32();
    const std::string meta = r.str(meta_len);
    const uint32_t meta_crc = r.u32();
    if (crc32(reinterpret_cast<const uint8_t*>(meta.data()), meta.size()) != meta_crc) {
        throw FormatError("checkpoint meta block is corrupted (crc mismatch)");
    }
    try {
        ckpt.meta = nlohmann::json::parse(meta);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint meta is not valid JSON: ") + e.what());
    }
    const uint32_t count = r.u32();
    for (uint32_t i = 0; i < count; ++i) {
        const size_t rec_start = r.pos();
        CheckpointTensor t;
        const uint32_t name_len = r.u32();
        t.name = r.str(name_len);
        t.dtype = r.u8();
        if (t.dtype != kDtypeF32 && t.dtype != kDtypeF64) {
            throw FormatError("tensor '" + t.name + "' has unknown dtype code " + std::to_string(t.dtype));
        }
        t.trainable = r.u8() != 0;
        const uint32_t rank = r.u32();
        int64_t numel = 1;
        for (uint32_t a = 0; a < rank; ++a) {
            const uint32_t e = r.u32();
            if (e == 0) throw FormatError("tensor '" + t.name + "' declares a zero extent");
            t.shape.push_back(static_cast<int64_t>(e));
            numel *= e;
        }
        const size_t elem_size = t.dtype == kDtypeF32 ? 4 : 8;
        if (static_cast<size_t>(numel) * elem_size > r.remaining()) {
            throw IoError("tensor '" + t.name + "' payload of " + std::to_string(numel) +
                          " elements exceeds the remaining file bytes");
        }
        t.values.resize(static_cast<size_t>(numel));
        for (double& v : t.values) v = t.dtype == kDtypeF32 ? static_cast<double>(r.f32()) : r.f64();
        const size_t rec_end = r.pos();
        const uint32_t stored_crc = r.u32();
        // recompute over the raw record bytes
        const uint32_t actual_crc = crc32(bytes.data() + rec_start, rec_end - rec_start);
        if (stored_crc != actual_crc) {
            throw FormatError("checkpoint tensor '" + t.name + "' is corrupted (crc mismatch)");
        }
        for (double v : t.values) {
            if (!std::isfinite(v)) {
                throw FormatError("checkpoint tensor '" + t.name + "' contains a non-finite value");
            }
        }
        ckpt.tensors.push_back(std::move(t));
    }
    if (!r.at_end()) {
        throw FormatError("checkpoint has trailing bytes after the last tensor record");
    }
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
    return decode_checkpoint(read_file(path));
}

} // namespace eegdiff
