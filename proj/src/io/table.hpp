#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace eegdiff {

// Minimal CSV emitter with deterministic float formatting, so identical runs
// produce byte-identical logs.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header);

    void row(const std::vector<std::string>& cells);
    void flush() { out_.flush(); }

    static std::string num(double v);
    static std::string num(int64_t v) { return std::to_string(v); }

private:
    std::ofstream out_;
    size_t columns_;
};

// Binary PPM (P6) image IO; tensors are [3 x H x W] with values in [0, 1].
void write_ppm(const std::string& path, const Tensor& image);
Tensor read_ppm(const std::string& path);

} // namespace eegdiff
