#include "diffusion/train.hpp"

#include <cmath>
#include <memory>
#include <numeric>

#include "io/table.hpp"

namespace eegdiff {

Tensor sd_loss(const std::vector<DiffusionBatchItem>& batch, const DenoiseFn& predict,
               const DiffusionSchedule& schedule, Rng& rng) {
    if (batch.empty()) throw Error("sd_loss: empty batch");
    Tensor total;
    for (size_t i = 0; i < batch.size(); ++i) {
        const DiffusionBatchItem& item = batch[i];
        const int64_t t = 1 + rng.uniform_int(schedule.timesteps);
        Tensor eps = Tensor::randn(item.z0.shape(), rng);
        Tensor z_t = q_sample(item.z0, t, eps, schedule);
        Tensor eps_hat = predict(z_t, t, item.context);
        Tensor diff = sub(eps, eps_hat);
        Tensor loss = mean(mul(diff, diff));
        total = i == 0 ? loss : add(total, loss);
    }
    return affine(total, 1.0 / static_cast<double>(batch.size()), 0.0);
}

Tensor sd_loss(const std::vector<DiffusionBatchItem>& batch, const ConditionalDenoiser& model,
               const DiffusionSchedule& schedule, Rng& rng) {
    return sd_loss(
        batch, [&model](const Tensor& z_t, int64_t t, const Tensor* ctx) { return model.predict(z_t, t, ctx); },
        schedule, rng);
}

Tensor reverse_step(const Tensor& z_t, int64_t t, const Tensor& eps_hat, const DiffusionSchedule& schedule,
                    Rng& rng) {
    const double beta = schedule.beta_at(t);
    const double alpha = 1.0 - beta;
    const double ab = schedule.alpha_bar_at(t);
    const double coeff = beta / std::sqrt(1.0 - ab);
    Tensor mean_z = affine(sub(z_t, affine(eps_hat, coeff, 0.0)), 1.0 / std::sqrt(alpha), 0.0);
    if (t == 1) return mean_z;
    Tensor noise = Tensor::randn(z_t.shape(), rng);
    return add(mean_z, affine(noise, std::sqrt(beta), 0.0));
}

Tensor LatentStats::normalize(const Tensor& raw) const {
    return affine(raw, 1.0 / scale, -shift / scale);
}

Tensor LatentStats::denormalize(const Tensor& normalized) const {
    return affine(normalized, scale, shift);
}

LatentStats latent_stats_from(const Checkpoint& ckpt) {
    LatentStats stats;
    if (const CheckpointTensor* t = ckpt.find("latent.shift")) stats.shift = t->values.at(0);
    if (const CheckpointTensor* t = ckpt.find("latent.scale")) stats.scale = t->values.at(0);
    if (stats.scale <= 0.0) throw FormatError("latent.scale must be positive");
    return stats;
}

std::vector<Tensor> sample_images(const std::vector<const Tensor*>& contexts, const ConditionalDenoiser& model,
                                  const DiffusionSchedule& schedule, const ImageAutoencoder& ae,
                                  const LatentStats& stats, Rng& rng) {
    NoTapeGuard guard;
    std::vector<Tensor> images;
    images.reserve(contexts.size());
    for (size_t i = 0; i < contexts.size(); ++i) {
        Rng stream = rng.derive(static_cast<uint64_t>(i));
        Tensor z = Tensor::randn(model.config().latent_shape, stream);
        for (int64_t t = schedule.timesteps; t >= 1; --t) {
            Tensor eps_hat = model.predict(z, t, contexts[i]);
            z = reverse_step(z, t, eps_hat, schedule, stream);
        }
        Tensor img = ae.decode(stats.denormalize(z));
        std::vector<double> clamped = img.data();
        for (double& v : clamped) v = std::clamp(v, 0.0, 1.0);
        images.push_back(Tensor::from_data(img.shape(), std::move(clamped)));
    }
    return images;
}

ImageAutoencoder restore_autoencoder(const Checkpoint& ckpt, const RunConfig& cfg) {
    Rng dummy(0);
    ImageAutoencoder ae(AeConfig::from(cfg), dummy);
    ParamSet registry;
    registry.absorb("ae", ae.params());
    // checkpoints may carry more than the ae (combined model files)
    Checkpoint only_ae;
    only_ae.meta = ckpt.meta;
    for (const CheckpointTensor& t : ckpt.tensors) {
        if (t.name.rfind("ae.", 0) == 0) only_ae.tensors.push_back(t);
    }
    if (only_ae.tensors.empty() && !ae.config().identity) {
        throw FormatError("checkpoint carries no autoencoder parameters");
    }
    load_into(only_ae, registry);
    return ae;
}

TrainLdmResult train_ldm(const std::vector<Tensor>& images, const std::vector<Tensor>& image_contexts,
                         const Checkpoint& ae_checkpoint, const RunConfig& cfg,
                         const std::string& log_csv_path) {
    if (images.empty()) throw Error("train_ldm: no images");
    if (!image_contexts.empty()) {
        if (image_contexts.size() != images.size()) {
            throw ShapeError("train_ldm: need one context row per image");
        }
        const int64_t d_tau = cfg.i64("ldm.context_dim");
        for (const Tensor& c : image_contexts) {
            if (c.rank() != 2 || c.extent(0) != 1 || c.extent(1) != d_tau) {
                throw ShapeError("train_ldm: contexts must be [1 x " + std::to_string(d_tau) + "]");
            }
        }
    }
    ImageAutoencoder ae = restore_autoencoder(ae_checkpoint, cfg);

    DiffusionSchedule schedule =
        make_schedule(cfg.i64("ldm.timesteps"), cfg.f64("ldm.beta_start"), cfg.f64("ldm.beta_end"));

    Rng stage(mix_seed(cfg.seed(), "train-ldm"));
    Rng init = stage.derive("denoiser-init");
    ConditionalDenoiser model(DenoiserConfig::from(cfg, ae.latent_shape()), init);

    std::vector<Tensor> latents;
    latents.reserve(images.size());
    LatentStats stats;
    {
        NoTapeGuard guard;
        double sum = 0.0, sq = 0.0;
        int64_t count = 0;
        for (const Tensor& img : images) {
            latents.push_back(ae.encode(img));
            for (double v : latents.back().data()) {
                sum += v;
                sq += v * v;
                ++count;
            }
        }
        stats.shift = sum / static_cast<double>(count);
        const double var = sq / static_cast<double>(count) - stats.shift * stats.shift;
        stats.scale = std::sqrt(std::max(var, 1e-12));
        for (Tensor& z : latents) z = stats.normalize(z);
    }

    ParamSet registry;
    registry.absorb("denoiser", model.params());
    Adam opt(AdamConfig{cfg.f64("ldm.lr"), 0.9, 0.999, 1e-8});
    Rng order_rng = stage.derive("order");
    Rng noise_rng = stage.derive("noise");

    std::unique_ptr<CsvWriter> log;
    if (!log_csv_path.empty()) log = std::make_unique<CsvWriter>(log_csv_path, "epoch,step,loss");

    const int64_t epochs = cfg.i64("ldm.epochs");
    const int64_t batch = cfg.i64("ldm.batch_size");
    const int64_t n = static_cast<int64_t>(latents.size());
    int64_t step = 0;
    double last_loss = 0.0;
    for (int64_t epoch = 0; epoch < epochs; ++epoch) {
        std::vector<int64_t> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        for (int64_t i = n - 1; i > 0; --i) {
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(order_rng.uniform_int(i + 1))]);
        }
        for (int64_t start = 0; start < n; start += batch) {
            const int64_t bsz = std::min(batch, n - start);
            ++step;
            try {
                Tape tape;
                std::vector<DiffusionBatchItem> items;
                for (int64_t b = 0; b < bsz; ++b) {
                    const size_t idx = static_cast<size_t>(order[static_cast<size_t>(start + b)]);
                    // null-row dropout keeps the unconditional mode trained
                    const Tensor* ctx = nullptr;
                    if (!image_contexts.empty() && noise_rng.uniform() >= 0.5) ctx = &image_contexts[idx];
                    items.push_back({latents[idx], ctx});
                }
                Tensor loss = sd_loss(items, model, schedule, noise_rng);
                last_loss = loss.item();
                GradMap grads = tape.backward(loss);
                opt.step(registry, grads);
                if (log) log->row({CsvWriter::num(epoch), CsvWriter::num(step), CsvWriter::num(last_loss)});
            } catch (const NumericError& e) {
                throw Error("diffusion warmup diverged at step " + std::to_string(step) + ": " + e.what());
            }
        }
    }

    // freezing stance for downstream stages: only the cross-attention heads
    // stay adjustable, everything else is part of the fixed generator
    ParamSet out;
    out.absorb("ae", ae.params());
    out.absorb("denoiser", model.params());
    out.add("latent.shift", Tensor::scalar(stats.shift));
    out.add("latent.scale", Tensor::scalar(stats.scale));
    out.set_all_trainable(false);
    for (auto& [name, p] : out.entries()) {
        if (name.rfind("denoiser.", 0) == 0 &&
            ConditionalDenoiser::is_attention_head_param(name.substr(9))) {
            p.trainable = true;
            p.tensor.set_requires_grad(true);
        }
    }
    TrainLdmResult result;
    result.final_loss = last_loss;
    result.checkpoint = make_checkpoint(out, "train-ldm", cfg.seed(), cfg.snapshot());
    return result;
}

} // namespace eegdiff
