#include "io/corpus.hpp"

#include <cmath>

#include "io/binary.hpp"

namespace eegdiff {

namespace {

constexpr char kMagic[4] = {'E', 'E', 'G', 'C'};
constexpr uint16_t kVersion = 1;

void write_header(ByteWriter& w, uint32_t count) {
    w.bytes(kMagic, 4);
    w.u16(kVersion);
    w.u32(count);
}

uint32_t read_header(ByteReader& r) {
    std::string magic = r.str(4);
    if (magic != std::string(kMagic, 4)) {
        throw FormatError("not a corpus file (bad magic)");
    }
    const uint16_t version = r.u16();
    if (version != kVersion) {
        throw FormatError("unsupported corpus version " + std::to_string(version));
    }
    return r.u32();
}

void write_recording(ByteWriter& w, const EegRecording& rec) {
    validate_recording(rec);
    w.u32(rec.subject_id);
    w.i32(rec.label);
    w.f32(static_cast<float>(rec.sample_rate_hz));
    w.u32(static_cast<uint32_t>(rec.channels()));
    w.u32(static_cast<uint32_t>(rec.length()));
    for (double v : rec.samples.data()) w.f32(static_cast<float>(v));
}

EegRecording read_recording(ByteReader& r, size_t index) {
    EegRecording rec;
    rec.subject_id = r.u32();
    rec.label = r.i32();
    rec.sample_rate_hz = static_cast<double>(r.f32());
    const uint32_t c = r.u32();
    const uint32_t l = r.u32();
    if (c == 0 || l == 0) {
        throw FormatError("corpus record " + std::to_string(index) + " declares an empty shape");
    }
    if (static_cast<size_t>(c) * l * 4 > r.remaining()) {
        throw IoError("corpus record " + std::to_string(index) + " truncated: needed bytes [" +
                      std::to_string(r.pos()) + ", " + std::to_string(r.pos() + static_cast<size_t>(c) * l * 4) +
                      ") but only " + std::to_string(r.remaining()) + " remain");
    }
    std::vector<double> data(static_cast<size_t>(c) * l);
    for (double& v : data) {
        v = static_cast<double>(r.f32());
        if (!std::isfinite(v)) {
            throw FormatError("corpus record " + std::to_string(index) + " contains a non-finite sample");
        }
    }
    rec.samples = Tensor::from_data({static_cast<int64_t>(c), static_cast<int64_t>(l)}, std::move(data));
    validate_recording(rec);
    return rec;
}

Tensor read_image(ByteReader& r, size_t index) {
    const uint32_t h = r.u32();
    const uint32_t w = r.u32();
    if (h == 0 || w == 0) {
        throw FormatError("corpus record " + std::to_string(index) + " declares an empty image");
    }
    if (12ull * h * w > r.remaining()) {
        throw IoError("corpus record " + std::to_string(index) + " image truncated: needed bytes [" +
                      std::to_string(r.pos()) + ", " + std::to_string(r.pos() + 12ull * h * w) + ") but only " +
                      std::to_string(r.remaining()) + " remain");
    }
    std::vector<double> img(3ull * h * w);
    for (double& v : img) {
        v = static_cast<double>(r.f32());
        if (!std::isfinite(v)) {
            throw FormatError("corpus record " + std::to_string(index) + " contains a non-finite pixel");
        }
    }
    return Tensor::from_data({3, static_cast<int64_t>(h), static_cast<int64_t>(w)}, std::move(img));
}

void expect_consumed(const ByteReader& r) {
    if (!r.at_end()) {
        throw FormatError("corpus payload has " + std::to_string(r.remaining()) +
                          " trailing bytes; plain and paired corpora are distinct formats");
    }
}

} // namespace

std::vector<uint8_t> encode_recordings(const std::vector<EegRecording>& recs) {
    ByteWriter w;
    write_header(w, static_cast<uint32_t>(recs.size()));
    for (const EegRecording& rec : recs) write_recording(w, rec);
    return w.buffer();
}

std::vector<EegRecording> decode_recordings(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    const uint32_t count = read_header(r);
    std::vector<EegRecording> recs;
    recs.reserve(count);
    for (uint32_t i = 0; i < count; ++i) recs.push_back(read_recording(r, i));
    expect_consumed(r);
    return recs;
}

std::vector<uint8_t> encode_paired(const PairedDataset& ds) {
    ByteWriter w;
    write_header(w, static_cast<uint32_t>(ds.samples.size()));
    for (const PairedSample& s : ds.samples) {
        if (s.recording.label != s.class_index) {
            throw FormatError("paired sample label/class mismatch");
        }
        write_recording(w, s.recording);
        if (s.image.rank() != 3 || s.image.extent(0) != 3) {
            throw ShapeError("paired image must be [3 x H x W]");
        }
        w.u32(static_cast<uint32_t>(s.image.extent(1)));
        w.u32(static_cast<uint32_t>(s.image.extent(2)));
        for (double v : s.image.data()) w.f32(static_cast<float>(v));
    }
    return w.buffer();
}

PairedDataset decode_paired(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    const uint32_t count = read_header(r);
    PairedDataset ds;
    ds.samples.reserve(count);
    int64_t max_label = -1;
    for (uint32_t i = 0; i < count; ++i) {
        PairedSample s;
        s.recording = read_recording(r, i);
        s.image = read_image(r, i);
        if (s.recording.label < 0) {
            throw FormatError("paired corpus record " + std::to_string(i) + " is unlabeled");
        }
        s.class_index = s.recording.label;
        max_label = std::max<int64_t>(max_label, s.class_index);
        ds.samples.push_back(std::move(s));
    }
    expect_consumed(r);
    ds.class_count = max_label + 1;
    return ds;
}

void save_recordings(const std::string& path, const std::vector<EegRecording>& recs) {
    write_file(path, encode_recordings(recs));
}

std::vector<EegRecording> load_recordings(const std::string& path) {
    return decode_recordings(read_file(path));
}

void save_paired(const std::string& path, const PairedDataset& ds) {
    write_file(path, encode_paired(ds));
}

PairedDataset load_paired(const std::string& path) {
    return decode_paired(read_file(path));
}

} // namespace eegdiff
