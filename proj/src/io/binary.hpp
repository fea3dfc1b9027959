#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace eegdiff {

// Little-endian encode/decode over in-memory buffers. Readers throw IoError
// naming the missing byte range on truncation.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v);
    void u32(uint32_t v);
    void u64(uint64_t v);
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void f32(float v);
    void f64(double v);
    void bytes(const void* p, size_t n);
    void str(const std::string& s) { bytes(s.data(), s.size()); }

    const std::vector<uint8_t>& buffer() const { return buf_; }
    size_t size() const { return buf_.size(); }

private:
    std::vector<uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::vector<uint8_t> data) : buf_(std::move(data)) {}

    uint8_t u8();
    uint16_t u16();
    uint32_t u32();
    uint64_t u64();
    int32_t i32() { return static_cast<int32_t>(u32()); }
    float f32();
    double f64();
    std::vector<uint8_t> bytes(size_t n);
    std::string str(size_t n);

    size_t pos() const { return pos_; }
    size_t remaining() const { return buf_.size() - pos_; }
    bool at_end() const { return pos_ == buf_.size(); }

private:
    void need(size_t n);
    std::vector<uint8_t> buf_;
    size_t pos_ = 0;
};

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<uint8_t>& data);

} // namespace eegdiff
