#pragma once

#include "config/config.hpp"
#include "signal/recording.hpp"

namespace eegdiff {

// Channel padding by cyclic replication: channel j >= C copies channel j mod C.
EegRecording pad_channels(const EegRecording& rec, int64_t target_c);

// First target_length samples.
EegRecording truncate_length(const EegRecording& rec, int64_t target_length);

// Per-channel z-score; a constant channel becomes all zeros (eps-guarded).
EegRecording zscore_channels(const EegRecording& rec, double eps = 1e-8);

struct PreprocessConfig {
    double band_low_hz = 5.0;
    double band_high_hz = 95.0;
    int filter_taps = 101;
    int64_t target_channels = 32;
    int64_t target_length = 512;

    static PreprocessConfig from(const RunConfig& cfg);
};

// bandpass -> truncate -> pad channels -> per-channel z-score
EegRecording preprocess(const EegRecording& rec, const PreprocessConfig& cfg);

// Temporally tokenized recording: token i holds all channels over time steps
// [i*S, (i+1)*S), channel-major within the row.
struct TokenSequence {
    Tensor tokens; // [N x (C*S)]
    int64_t token_size = 0;
    int64_t channels = 0;
    uint32_t subject_id = 0;
    int32_t label = -1;

    int64_t count() const { return tokens.extent(0); }
    int64_t dim() const { return tokens.extent(1); }
};

TokenSequence tokenize(const EegRecording& rec, int64_t token_size);
EegRecording detokenize(const TokenSequence& seq, double sample_rate_hz);

} // namespace eegdiff
