#pragma once

#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace eegdiff {

// Multichannel time-series sample. samples is [C x L]; label is a class
// index or -1 when unlabeled.
struct EegRecording {
    Tensor samples;
    double sample_rate_hz = 0.0;
    uint32_t subject_id = 0;
    int32_t label = -1;

    int64_t channels() const { return samples.extent(0); }
    int64_t length() const { return samples.extent(1); }
};

void validate_recording(const EegRecording& rec);

struct PairedSample {
    EegRecording recording;
    Tensor image; // [3 x H x W], values in [0, 1]
    int32_t class_index = 0;
};

struct PairedDataset {
    std::vector<PairedSample> samples;
    std::string split; // "train" or "test"
    int64_t class_count = 0;
};

} // namespace eegdiff
