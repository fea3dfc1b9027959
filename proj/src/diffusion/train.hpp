#pragma once

#include "core/adam.hpp"
#include "diffusion/autoencoder.hpp"
#include "diffusion/denoiser.hpp"
#include "diffusion/schedule.hpp"

namespace eegdiff {

struct DiffusionBatchItem {
    Tensor z0;                     // clean latent
    const Tensor* context = nullptr; // nullptr selects the null context
};

// Denoising objective: per sample draw t ~ U{1..T} and eps ~ N(0,1), corrupt,
// and take the mean squared error between eps and the prediction; averaged
// over the batch. The predictor form lets tests swap in stubs.
using DenoiseFn = std::function<Tensor(const Tensor& z_t, int64_t t, const Tensor* context)>;

Tensor sd_loss(const std::vector<DiffusionBatchItem>& batch, const DenoiseFn& predict,
               const DiffusionSchedule& schedule, Rng& rng);
Tensor sd_loss(const std::vector<DiffusionBatchItem>& batch, const ConditionalDenoiser& model,
               const DiffusionSchedule& schedule, Rng& rng);

// Diffusion runs on normalized latents: z' = (E(x) - shift) * inv_scale, so
// the chain starts from a unit-variance prior. The constants are measured
// once during warmup and carried in the checkpoints as latent.shift and
// latent.scale.
struct LatentStats {
    double shift = 0.0;
    double scale = 1.0; // std of raw latents; z' = (z - shift) / scale

    Tensor normalize(const Tensor& raw) const;
    Tensor denormalize(const Tensor& normalized) const;
};

LatentStats latent_stats_from(const Checkpoint& ckpt);

// Ancestral DDPM reverse chain from pure noise, decoded and clamped to [0,1].
// contexts[i] == nullptr samples unconditionally. Each image draws from an
// independent stream of rng, so images are order-independent.
std::vector<Tensor> sample_images(const std::vector<const Tensor*>& contexts, const ConditionalDenoiser& model,
                                  const DiffusionSchedule& schedule, const ImageAutoencoder& ae,
                                  const LatentStats& stats, Rng& rng);

// One reverse step (exposed for the closed-form single-step test).
Tensor reverse_step(const Tensor& z_t, int64_t t, const Tensor& eps_hat, const DiffusionSchedule& schedule,
                    Rng& rng);

struct TrainLdmResult {
    Checkpoint checkpoint; // ae.* frozen + denoiser.* (attention heads trainable)
    double final_loss = 0.0;
};

// Warmup of the denoiser on autoencoded latents; the stand-in for a
// pretrained generator that fine-tuning then adapts via its cross-attention
// heads. image_contexts, when given (one [1 x d_tau] row per image), provide
// the conditioning the generator grows up with; each step drops to the
// learned null row half the time so the unconditional mode trains too. An
// empty vector trains fully unconditionally.
TrainLdmResult train_ldm(const std::vector<Tensor>& images, const std::vector<Tensor>& image_contexts,
                         const Checkpoint& ae_checkpoint, const RunConfig& cfg,
                         const std::string& log_csv_path = "");

// Rebuilds the (frozen) autoencoder from a checkpoint that embeds ae.*.
ImageAutoencoder restore_autoencoder(const Checkpoint& ckpt, const RunConfig& cfg);

} // namespace eegdiff
