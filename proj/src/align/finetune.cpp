#include "align/finetune.hpp"

#include <numeric>

#include "io/table.hpp"

namespace eegdiff {

FinetunePolicy FinetunePolicy::from_name(const std::string& groups, double lambda_clip) {
    FinetunePolicy p;
    p.lambda_clip = lambda_clip;
    if (groups == "E+A") {
        p.train_encoder = true;
        p.train_attention = true;
    } else if (groups == "E_only" || groups == "E only") {
        p.train_encoder = true;
        p.train_attention = false;
    } else if (groups == "A_only" || groups == "A only") {
        p.train_encoder = false;
        p.train_attention = true;
    } else {
        throw ConfigError("unknown finetune policy '" + groups + "' (expected E+A, E_only or A_only)");
    }
    return p;
}

FinetunePolicy FinetunePolicy::from_config(const RunConfig& cfg) {
    return from_name(cfg.str("finetune.policy"), cfg.f64("finetune.lambda_clip"));
}

std::string FinetunePolicy::group_name() const {
    if (train_encoder && train_attention) return "E+A";
    if (train_encoder) return "E_only";
    if (train_attention) return "A_only";
    return "none";
}

namespace {

Checkpoint filter_prefix(const Checkpoint& ckpt, const std::string& prefix) {
    Checkpoint out;
    out.meta = ckpt.meta;
    for (const CheckpointTensor& t : ckpt.tensors) {
        if (t.name.rfind(prefix, 0) == 0) out.tensors.push_back(t);
    }
    return out;
}

} // namespace

FinetuneResult finetune(const PairedDataset& train, const Checkpoint* eeg_checkpoint,
                        const Checkpoint& ldm_checkpoint, const Checkpoint& imgenc_checkpoint,
                        const FinetunePolicy& policy, const RunConfig& cfg,
                        const std::string& log_csv_path) {
    if (train.samples.empty()) throw Error("finetune: empty paired dataset");

    Rng stage(mix_seed(cfg.seed(), "finetune"));

    // models
    Rng enc_rng = stage.derive("encoder-init");
    EegEncoder encoder(EncoderConfig::from(cfg), enc_rng);
    ImageAutoencoder ae = restore_autoencoder(ldm_checkpoint, cfg);
    Rng den_rng = stage.derive("denoiser-init");
    ConditionalDenoiser denoiser(DenoiserConfig::from(cfg, ae.latent_shape()), den_rng);
    Rng tau_rng = stage.derive("tau-init");
    ConditionProjector tau(cfg.i64("msm.d_model"), cfg.i64("ldm.context_dim"), tau_rng);
    Rng head_rng = stage.derive("head-init");
    AlignmentHead head(cfg.i64("ldm.context_dim"), cfg.i64("imgenc.dim"), head_rng);
    ImageEncoder imgenc = restore_image_encoder(imgenc_checkpoint, ImageEncoderConfig::from(cfg));
    const ContextPooling pooling = pooling_from_string(cfg.str("finetune.pooling"));

    const LatentStats stats = latent_stats_from(ldm_checkpoint);

    ParamSet registry;
    registry.absorb("encoder", encoder.params());
    registry.absorb("tau", tau.params());
    registry.absorb("denoiser", denoiser.params());
    registry.absorb("ae", ae.params());
    registry.absorb("head_h", head.params());
    registry.add("latent.shift", Tensor::scalar(stats.shift), false);
    registry.add("latent.scale", Tensor::scalar(stats.scale), false);

    // load weights: denoiser + ae from the warmup checkpoint, encoder from
    // pretraining when given
    load_into(filter_prefix(ldm_checkpoint, "denoiser."), registry);
    load_into(filter_prefix(ldm_checkpoint, "ae."), registry);
    if (eeg_checkpoint) load_into(filter_prefix(*eeg_checkpoint, "encoder."), registry);

    // effective trainability = loaded flag AND policy group membership
    for (auto& [name, p] : registry.entries()) {
        bool trainable = p.trainable;
        if (name.rfind("encoder.", 0) == 0) {
            trainable = trainable && policy.train_encoder;
        } else if (name.rfind("denoiser.", 0) == 0) {
            trainable = trainable && ConditionalDenoiser::is_attention_head_param(name.substr(9)) &&
                        policy.train_attention;
        } else if (name.rfind("ae.", 0) == 0) {
            trainable = false;
        } else if (name.rfind("tau.", 0) == 0) {
            trainable = policy.train_projector;
        } else if (name.rfind("head_h.", 0) == 0) {
            trainable = policy.train_head;
        }
        p.trainable = trainable;
        p.tensor.set_requires_grad(trainable);
    }

    DiffusionSchedule schedule =
        make_schedule(cfg.i64("ldm.timesteps"), cfg.f64("ldm.beta_start"), cfg.f64("ldm.beta_end"));

    // per-sample constants
    std::vector<Tensor> tokens, latents, image_embs;
    {
        NoTapeGuard guard;
        for (const PairedSample& s : train.samples) {
            tokens.push_back(prepare_tokens(s.recording, cfg).tokens);
            latents.push_back(stats.normalize(ae.encode(s.image)));
            image_embs.push_back(imgenc.embed(s.image));
        }
    }

    Adam opt(AdamConfig{cfg.f64("finetune.lr"), 0.9, 0.999, 1e-8});
    Rng order_rng = stage.derive("order");
    Rng noise_rng = stage.derive("noise");

    std::unique_ptr<CsvWriter> log;
    if (!log_csv_path.empty()) log = std::make_unique<CsvWriter>(log_csv_path, "epoch,step,l_sd,l_clip");

    const int64_t epochs = cfg.i64("finetune.epochs");
    const int64_t batch = cfg.i64("finetune.batch_size");
    const int64_t n = static_cast<int64_t>(train.samples.size());
    const double lambda = policy.lambda_clip;
    int64_t step = 0;
    double last_sd = 0.0, last_clip = 0.0;
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
                Tensor sd_total, clip_total;
                std::vector<Tensor> contexts; // keep alive for the backward pass
                for (int64_t b = 0; b < bsz; ++b) {
                    const int64_t idx = order[static_cast<size_t>(start + b)];
                    Tensor y = encoder.encode(tokens[static_cast<size_t>(idx)]);
                    contexts.push_back(tau.forward(y));
                    const Tensor& ctx = contexts.back();
                    const int64_t t = 1 + noise_rng.uniform_int(schedule.timesteps);
                    Tensor eps = Tensor::randn(latents[static_cast<size_t>(idx)].shape(), noise_rng);
                    Tensor z_t = q_sample(latents[static_cast<size_t>(idx)], t, eps, schedule);
                    Tensor diff = sub(eps, denoiser.predict(z_t, t, &ctx));
                    Tensor l_sd = mean(mul(diff, diff));
                    sd_total = b == 0 ? l_sd : add(sd_total, l_sd);
                    if (lambda != 0.0) {
                        Tensor emb = eeg_clip_embedding(ctx, head, pooling);
                        Tensor l_clip = clip_loss(emb, image_embs[static_cast<size_t>(idx)]);
                        clip_total = b == 0 ? l_clip : add(clip_total, l_clip);
                    } else {
                        NoTapeGuard guard; // logged but never differentiated
                        Tensor emb = eeg_clip_embedding(ctx, head, pooling);
                        Tensor l_clip = clip_loss(emb, image_embs[static_cast<size_t>(idx)]);
                        clip_total =
                            b == 0 ? l_clip : Tensor::scalar(clip_total.item() + l_clip.item());
                    }
                }
                Tensor sd_mean = affine(sd_total, 1.0 / static_cast<double>(bsz), 0.0);
                last_sd = sd_mean.item();
                last_clip = clip_total.item() / static_cast<double>(bsz);
                Tensor loss = lambda != 0.0
                                  ? add(sd_mean, affine(clip_total, lambda / static_cast<double>(bsz), 0.0))
                                  : sd_mean;
                GradMap grads = tape.backward(loss);
                opt.step(registry, grads);
                if (log) {
                    log->row({CsvWriter::num(epoch), CsvWriter::num(step), CsvWriter::num(last_sd),
                              CsvWriter::num(last_clip)});
                }
            } catch (const NumericError& e) {
                throw Error("fine-tuning diverged at step " + std::to_string(step) + ": " + e.what());
            }
        }
    }

    FinetuneResult result;
    result.final_sd_loss = last_sd;
    result.final_clip_loss = last_clip;
    result.checkpoint = make_checkpoint(registry, "finetune", cfg.seed(), cfg.snapshot());
    return result;
}

Tensor GenerativeModel::context_for(const Tensor& tokens) const {
    NoTapeGuard guard;
    return tau->forward(encoder->encode(tokens));
}

GenerativeModel restore_generative_model(const Checkpoint& ckpt, const RunConfig& cfg) {
    GenerativeModel m;
    Rng dummy(0);
    m.encoder = std::make_unique<EegEncoder>(EncoderConfig::from(cfg), dummy);
    m.ae = std::make_unique<ImageAutoencoder>(AeConfig::from(cfg), dummy);
    m.denoiser = std::make_unique<ConditionalDenoiser>(DenoiserConfig::from(cfg, m.ae->latent_shape()), dummy);
    m.tau = std::make_unique<ConditionProjector>(cfg.i64("msm.d_model"), cfg.i64("ldm.context_dim"), dummy);
    m.head = std::make_unique<AlignmentHead>(cfg.i64("ldm.context_dim"), cfg.i64("imgenc.dim"), dummy);
    m.schedule = make_schedule(cfg.i64("ldm.timesteps"), cfg.f64("ldm.beta_start"), cfg.f64("ldm.beta_end"));
    ParamSet registry;
    registry.absorb("encoder", m.encoder->params());
    registry.absorb("tau", m.tau->params());
    registry.absorb("denoiser", m.denoiser->params());
    registry.absorb("ae", m.ae->params());
    registry.absorb("head_h", m.head->params());
    registry.add("latent.shift", Tensor::scalar(0.0), false);
    registry.add("latent.scale", Tensor::scalar(1.0), false);
    load_into(ckpt, registry);
    m.latent_stats = latent_stats_from(ckpt);
    return m;
}

} // namespace eegdiff
