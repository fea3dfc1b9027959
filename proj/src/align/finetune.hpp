#pragma once

#include <memory>
#include <optional>

#include "align/alignment.hpp"
#include "align/image_encoder.hpp"
#include "diffusion/train.hpp"
#include "msm/pretrain.hpp"

namespace eegdiff {

// Trainable parameter groups during fine-tuning. E is the EEG encoder, A the
// cross-attention heads (every W_Q, W_K, W_V of the denoiser); the projector
// tau and the alignment head h are fresh layers and train under every preset.
struct FinetunePolicy {
    bool train_encoder = true;
    bool train_attention = true;
    bool train_projector = true;
    bool train_head = true;
    double lambda_clip = 1.0;

    static FinetunePolicy from_name(const std::string& groups, double lambda_clip);
    static FinetunePolicy from_config(const RunConfig& cfg);
    std::string group_name() const;
};

struct FinetuneResult {
    Checkpoint checkpoint; // encoder + tau + denoiser + ae + head_h, flags = policy
    double final_sd_loss = 0.0;
    double final_clip_loss = 0.0;
};

// Joint fine-tuning: L = L_sd + lambda * L_align per batch. The alignment
// term only touches the encoder, tau and h by construction; the optimizer
// only updates the policy's trainable groups. eeg_checkpoint == nullptr
// starts from a randomly initialized encoder (the no-pretraining ablations).
FinetuneResult finetune(const PairedDataset& train, const Checkpoint* eeg_checkpoint,
                        const Checkpoint& ldm_checkpoint, const Checkpoint& imgenc_checkpoint,
                        const FinetunePolicy& policy, const RunConfig& cfg,
                        const std::string& log_csv_path = "");

// The conditional generator rebuilt from a finetune checkpoint.
struct GenerativeModel {
    std::unique_ptr<EegEncoder> encoder;
    std::unique_ptr<ConditionProjector> tau;
    std::unique_ptr<ImageAutoencoder> ae;
    std::unique_ptr<ConditionalDenoiser> denoiser;
    std::unique_ptr<AlignmentHead> head;
    DiffusionSchedule schedule;
    LatentStats latent_stats;

    // Unmasked encode + projection, off the tape. [N x d_tau]
    Tensor context_for(const Tensor& tokens) const;
};

GenerativeModel restore_generative_model(const Checkpoint& ckpt, const RunConfig& cfg);

} // namespace eegdiff
