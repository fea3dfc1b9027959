#pragma once

#include "config/config.hpp"
#include "core/params.hpp"
#include "diffusion/attention.hpp"

namespace eegdiff {

// Sinusoidal embedding of a scalar timestep, [1 x dim].
Tensor time_embedding(int64_t t, int64_t dim);

// LayerNorm across channels at each spatial position of a [C x H x W] map.
Tensor channel_layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta);

struct DenoiserConfig {
    Shape latent_shape{4, 8, 8};
    int64_t base_channels = 48;
    int64_t attn_dim = 64;
    int64_t context_dim = 128;
    int64_t heads = 1;
    int64_t time_dim = 64;

    static DenoiserConfig from(const RunConfig& cfg, const Shape& latent_shape);
};

// Two-level UNet over latents: residual conv blocks with timestep bias, and
// one cross-attention block per resolution. Conditioning enters only through
// the attention context; a learned null row serves the unconditional mode.
class ConditionalDenoiser {
public:
    ConditionalDenoiser(const DenoiserConfig& cfg, Rng& rng);

    // context rows [M x d_tau]; nullptr selects the learned null context.
    Tensor predict(const Tensor& z_t, int64_t t, const Tensor* context) const;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    const DenoiserConfig& config() const { return cfg_; }

    // Names of the cross-attention head weights (the "A" trainable group).
    static bool is_attention_head_param(const std::string& name);

private:
    struct ResBlock {
        Tensor ln1_g, ln1_b, k1, b1, tw, tb, ln2_g, ln2_b, k2, b2;
        ResBlock() = default;
        ResBlock(ParamSet& params, const std::string& prefix, int64_t channels, int64_t time_dim, Rng& rng);
        Tensor forward(const Tensor& h, const Tensor& temb) const;
    };

    struct LevelAttention {
        CrossAttentionWeights w;
        Tensor wo, bo;
        int64_t heads = 1;
        LevelAttention() = default;
        LevelAttention(ParamSet& params, const std::string& prefix, int64_t channels, int64_t attn_dim,
                       int64_t context_dim, int64_t heads, Rng& rng);
        Tensor forward(const Tensor& h, const Tensor& context) const;
    };

    DenoiserConfig cfg_;
    ParamSet params_;
    Tensor time_w_, time_b_;
    Tensor in_k_, in_b_;
    ResBlock res1_, res2_, mid_, res3_;
    LevelAttention attn1_, attn2_;
    Tensor down_k_, down_b_, up_k_, up_b_;
    Tensor out_ln_g_, out_ln_b_, out_k_, out_b_;
    Tensor null_ctx_;
};

// EEG-encoder rows -> conditioning rows (tau projector).
class ConditionProjector {
public:
    ConditionProjector(int64_t d_model, int64_t context_dim, Rng& rng);
    Tensor forward(const Tensor& encoder_rows) const;
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

private:
    ParamSet params_;
    Tensor w_, b_;
};

} // namespace eegdiff
