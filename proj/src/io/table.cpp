#include "io/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "io/binary.hpp"

namespace eegdiff {

CsvWriter::CsvWriter(const std::string& path, const std::string& header)
    : out_(path, std::ios::trunc), columns_(1 + std::count(header.begin(), header.end(), ',')) {
    if (!out_) throw IoError("cannot open csv for writing: " + path);
    out_ << header << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
        throw Error("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                    std::to_string(columns_));
    }
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << "\n";
}

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_ppm(const std::string& path, const Tensor& image) {
    if (image.rank() != 3 || image.extent(0) != 3) {
        throw ShapeError("ppm image must be [3 x H x W]");
    }
    const int64_t h = image.extent(1), w = image.extent(2);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open ppm for writing: " + path);
    out << "P6\n" << w << " " << h << "\n255\n";
    const auto& d = image.data();
    std::vector<uint8_t> row(static_cast<size_t>(3 * w));
    for (int64_t i = 0; i < h; ++i) {
        for (int64_t j = 0; j < w; ++j) {
            for (int64_t c = 0; c < 3; ++c) {
                double v = d[static_cast<size_t>((c * h + i) * w + j)];
                v = std::clamp(v, 0.0, 1.0);
                row[static_cast<size_t>(3 * j + c)] = static_cast<uint8_t>(std::lround(v * 255.0));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("failed writing ppm: " + path);
}

Tensor read_ppm(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    // parse "P6\n<w> <h>\n255\n"
    size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
        return t;
    };
    if (token() != "P6") throw FormatError("not a binary ppm: " + path);
    const int64_t w = std::stoll(token());
    const int64_t h = std::stoll(token());
    const int64_t maxval = std::stoll(token());
    if (maxval != 255) throw FormatError("unsupported ppm maxval");
    ++pos; // single whitespace after maxval
    if (pos + static_cast<size_t>(3 * w * h) > bytes.size()) throw IoError("truncated ppm: " + path);
    std::vector<double> d(static_cast<size_t>(3 * h * w));
    for (int64_t i = 0; i < h; ++i)
        for (int64_t j = 0; j < w; ++j)
            for (int64_t c = 0; c < 3; ++c)
                d[static_cast<size_t>((c * h + i) * w + j)] =
                    bytes[pos + static_cast<size_t>((i * w + j) * 3 + c)] / 255.0;
    return Tensor::from_data({3, h, w}, std::move(d));
}

} // namespace eegdiff
