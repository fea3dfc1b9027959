#pragma once

#include "core/adam.hpp"
#include "io/checkpoint.hpp"
#include "msm/models.hpp"

namespace eegdiff {

struct PretrainResult {
    Checkpoint checkpoint; // encoder weights only; decoder is dropped
    double initial_masked_mse = 0.0;
    double final_masked_mse = 0.0;
    int64_t steps = 0;
};

// Masked-reconstruction pretraining over an unpaired corpus. Deterministic
// given (config, seed); logs `epoch,step,masked_mse` per step when
// log_csv_path is non-empty.
PretrainResult pretrain(const std::vector<EegRecording>& recordings, const RunConfig& cfg,
                        const std::string& log_csv_path = "");

// Preprocess + tokenize one recording under the configured geometry.
TokenSequence prepare_tokens(const EegRecording& rec, const RunConfig& cfg);

} // namespace eegdiff
