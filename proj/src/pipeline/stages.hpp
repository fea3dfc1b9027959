#pragma once

#include "eval/ablation.hpp"

namespace eegdiff {

// Path-level orchestration shared by the C API and the test harnesses.
// Every stage applies run.precision, derives its randomness from run.seed,
// and writes only the files named in its arguments.

void apply_precision(const RunConfig& cfg);

// Writes pretrain.eegc, train.eegc and test.eegc under out_dir.
void gen_data_stage(const RunConfig& cfg, const std::string& out_dir);

PretrainResult pretrain_stage(const RunConfig& cfg, const std::string& corpus_path,
                              const std::string& ckpt_out, const std::string& log_csv);

TrainAeResult train_ae_stage(const RunConfig& cfg, const std::string& pairs_path, const std::string& ckpt_out,
                             const std::string& log_csv);

TrainImageEncoderResult train_image_encoder_stage(const RunConfig& cfg, const std::string& pairs_path,
                                                  const std::string& ckpt_out, const std::string& log_csv);

// The warmup conditions on frozen image-encoder embeddings (with null-row
// dropout), so the fine-tuned EEG conditions land in a context space the
// generator already understands.
TrainLdmResult train_ldm_stage(const RunConfig& cfg, const std::string& pairs_path,
                               const std::string& ae_ckpt_path, const std::string& imgenc_ckpt_path,
                               const std::string& ckpt_out, const std::string& log_csv);

FinetuneResult finetune_stage(const RunConfig& cfg, const std::string& pairs_path,
                              const std::string& eeg_ckpt_path, const std::string& ldm_ckpt_path,
                              const std::string& imgenc_ckpt_path, const std::string& ckpt_out,
                              const std::string& log_csv);

// n_images <= 0 generates one image per paired sample. Writes
// sample_%04d.ppm plus index.csv (sample_id,class,context_source).
void generate_stage(const RunConfig& cfg, const std::string& pairs_path, const std::string& model_ckpt_path,
                    const std::string& out_dir, int64_t n_images, bool unconditional);

struct EvaluateResult {
    double conditional_accuracy = 0.0;
    double unconditional_accuracy = 0.0;
    int64_t unconditional_samples = 0;
    double probe_holdout_accuracy = 0.0;
};

// Trains the probe on the train pairs, generates one image set per test
// recording, scores top-1 agreement; optionally adds a null-context
// calibration run. Writes eval.csv and summary.csv under out_dir.
EvaluateResult evaluate_stage(const RunConfig& cfg, const std::string& test_pairs_path,
                              const std::string& train_pairs_path, const std::string& model_ckpt_path,
                              const std::string& out_dir, int64_t unconditional_samples);

// grid_json_path empty selects the built-in grid. data_dir must hold
// pretrain.eegc, train.eegc and test.eegc.
std::vector<AblationRowResult> ablate_stage(const RunConfig& cfg, const std::string& grid_json_path,
                                            const std::string& data_dir, const std::string& out_dir);

} // namespace eegdiff
