#pragma once

#include "align/finetune.hpp"
#include "eval/metrics.hpp"

namespace eegdiff {

// One grid row, mirroring the ablation axes: masked pretraining on/off,
// alignment supervision on/off, mask ratio, trainable groups.
struct AblationRowSpec {
    std::string id;
    bool msm = true;
    bool clip = true;
    double mask_ratio = -1.0; // < 0 means not applicable (no pretraining)
    std::string groups = "E+A";
};

std::vector<AblationRowSpec> default_grid();
std::vector<AblationRowSpec> parse_grid(const nlohmann::json& spec);

struct AblationRowResult {
    AblationRowSpec spec;
    int64_t params = 0;
    double accuracy = 0.0;
    bool failed = false;
    std::string error;
};

struct AblationData {
    std::vector<EegRecording> pretrain;
    PairedDataset train;
    PairedDataset test;
};

// Runs every row end-to-end, reusing the stages that do not depend on the
// row axes (autoencoder, warmup, image encoder, probe, and one pretraining
// per distinct mask ratio). A failing row is reported without aborting the
// rest. Writes out_dir/ablation.csv and a PPM sample directory per row.
std::vector<AblationRowResult> run_ablation(const AblationData& data, const std::vector<AblationRowSpec>& grid,
                                            const RunConfig& base, const std::string& out_dir);

} // namespace eegdiff
