#include "msm/models.hpp"

namespace eegdiff {

EncoderConfig EncoderConfig::from(const RunConfig& cfg) {
    EncoderConfig e;
    e.token_dim = cfg.i64("signal.target_channels") * cfg.i64("signal.token_size");
    e.d_model = cfg.i64("msm.d_model");
    e.blocks = cfg.i64("msm.blocks");
    e.heads = cfg.i64("msm.heads");
    e.mlp_ratio = cfg.i64("msm.mlp_ratio");
    e.max_tokens = cfg.i64("signal.target_length") / cfg.i64("signal.token_size");
    return e;
}

EegEncoder::EegEncoder(const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
    w_embed_ = params_.add("embed.w", glorot_uniform({cfg.d_model, cfg.token_dim}, cfg.token_dim, cfg.d_model, rng));
    b_embed_ = params_.add("embed.b", Tensor::zeros({cfg.d_model}));
    pos_ = sinusoidal_table(cfg.max_tokens, cfg.d_model);
    for (int64_t b = 0; b < cfg.blocks; ++b) {
        blocks_.emplace_back(params_, "block" + std::to_string(b), cfg.d_model, cfg.heads, cfg.mlp_ratio, rng);
    }
    ln_g_ = params_.add("out_norm.g", Tensor::full({cfg.d_model}, 1.0));
    ln_b_ = params_.add("out_norm.b", Tensor::zeros({cfg.d_model}));
}

Tensor EegEncoder::encode(const Tensor& tokens, const MaskPlan* plan) const {
    if (tokens.rank() != 2 || tokens.extent(1) != cfg_.token_dim) {
        throw ShapeError("encoder expects tokens [N x " + std::to_string(cfg_.token_dim) + "], got " +
                         shape_str(tokens.shape()));
    }
    if (tokens.extent(0) > cfg_.max_tokens) {
        throw ShapeError("token count exceeds the positional table");
    }
    std::vector<int64_t> positions;
    if (plan) {
        if (plan->n_tokens != tokens.extent(0)) {
            throw ShapeError("mask plan token count does not match the sequence");
        }
        plan->validate();
        positions = plan->visible;
    } else {
        positions.resize(static_cast<size_t>(tokens.extent(0)));
        for (int64_t i = 0; i < tokens.extent(0); ++i) positions[static_cast<size_t>(i)] = i;
    }
    Tensor rows = plan ? gather_rows(tokens, positions) : tokens;
    Tensor x = add(linear(rows, w_embed_, b_embed_), gather_rows(pos_, positions));
    for (const TransformerBlock& b : blocks_) x = b.forward(x);
    return layer_norm(x, ln_g_, ln_b_);
}

DecoderConfig DecoderConfig::from(const RunConfig& cfg) {
    DecoderConfig d;
    d.token_dim = cfg.i64("signal.target_channels") * cfg.i64("signal.token_size");
    d.d_model = cfg.i64("msm.d_model");
    d.d_dec = cfg.i64("msm.decoder_dim");
    d.blocks = cfg.i64("msm.decoder_blocks");
    d.heads = cfg.i64("msm.decoder_heads");
    d.mlp_ratio = cfg.i64("msm.mlp_ratio");
    d.max_tokens = cfg.i64("signal.target_length") / cfg.i64("signal.token_size");
    return d;
}

MsmDecoder::MsmDecoder(const DecoderConfig& cfg, Rng& rng) : cfg_(cfg) {
    w_proj_ = params_.add("proj.w", glorot_uniform({cfg.d_dec, cfg.d_model}, cfg.d_model, cfg.d_dec, rng));
    b_proj_ = params_.add("proj.b", Tensor::zeros({cfg.d_dec}));
    mask_token_ = params_.add("mask_token", Tensor::randn({1, cfg.d_dec}, rng, 0.02));
    pos_ = sinusoidal_table(cfg.max_tokens, cfg.d_dec);
    for (int64_t b = 0; b < cfg.blocks; ++b) {
        blocks_.emplace_back(params_, "block" + std::to_string(b), cfg.d_dec, cfg.heads, cfg.mlp_ratio, rng);
    }
    ln_g_ = params_.add("out_norm.g", Tensor::full({cfg.d_dec}, 1.0));
    ln_b_ = params_.add("out_norm.b", Tensor::zeros({cfg.d_dec}));
    w_head_ = params_.add("head.w", glorot_uniform({cfg.token_dim, cfg.d_dec}, cfg.d_dec, cfg.token_dim, rng));
    b_head_ = params_.add("head.b", Tensor::zeros({cfg.token_dim}));
}

Tensor MsmDecoder::reconstruct(const Tensor& latents, const MaskPlan& plan) const {
    plan.validate();
    if (latents.rank() != 2 || latents.extent(0) != static_cast<int64_t>(plan.visible.size()) ||
        latents.extent(1) != cfg_.d_model) {
        throw ShapeError("latents " + shape_str(latents.shape()) + " do not match the mask plan (" +
                         std::to_string(plan.visible.size()) + " visible tokens expected)");
    }
    if (plan.n_tokens > cfg_.max_tokens) throw ShapeError("plan exceeds the decoder positional table");
    Tensor z = linear(latents, w_proj_, b_proj_);
    Tensor stacked = concat(z, mask_token_, 0); // last row is the mask token
    const int64_t mask_row = z.extent(0);
    std::vector<int64_t> source(static_cast<size_t>(plan.n_tokens), mask_row);
    for (size_t r = 0; r < plan.visible.size(); ++r) {
        source[static_cast<size_t>(plan.visible[r])] = static_cast<int64_t>(r);
    }
    std::vector<int64_t> all_positions(static_cast<size_t>(plan.n_tokens));
    for (int64_t i = 0; i < plan.n_tokens; ++i) all_positions[static_cast<size_t>(i)] = i;
    Tensor x = add(gather_rows(stacked, source), gather_rows(pos_, all_positions));
    for (const TransformerBlock& b : blocks_) x = b.forward(x);
    return linear(layer_norm(x, ln_g_, ln_b_), w_head_, b_head_);
}

Tensor msm_loss(const Tensor& recon, const Tensor& target_tokens, const MaskPlan& plan) {
    if (recon.shape() != target_tokens.shape()) {
        throw ShapeError("msm_loss: reconstruction shape " + shape_str(recon.shape()) +
                         " does not match target " + shape_str(target_tokens.shape()));
    }
    if (plan.masked.empty()) throw ShapeError("msm_loss: empty masked set");
    if (recon.extent(0) != plan.n_tokens) {
        throw ShapeError("msm_loss: plan token count does not match the reconstruction");
    }
    Tensor diff = sub(gather_rows(recon, plan.masked), gather_rows(target_tokens, plan.masked));
    return mean(mul(diff, diff));
}

} // namespace eegdiff
