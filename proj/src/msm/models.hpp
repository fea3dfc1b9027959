#pragma once

#include "msm/mask.hpp"
#include "nn/transformer.hpp"
#include "signal/preprocess.hpp"

namespace eegdiff {

struct EncoderConfig {
    int64_t token_dim = 128; // channels * token_size
    int64_t d_model = 128;
    int64_t blocks = 4;
    int64_t heads = 4;
    int64_t mlp_ratio = 4;
    int64_t max_tokens = 512;

    static EncoderConfig from(const RunConfig& cfg);
};

// Token embedding (a per-token linear map, the stride=token convolution in
// matrix form), fixed sinusoidal positions indexed by original token
// position, and a pre-norm transformer stack.
class EegEncoder {
public:
    EegEncoder(const EncoderConfig& cfg, Rng& rng);

    // With a plan: embeds only visible tokens -> [N_visible x d_model].
    // Without: all tokens -> [N x d_model].
    Tensor encode(const Tensor& tokens, const MaskPlan* plan = nullptr) const;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    const EncoderConfig& config() const { return cfg_; }
    const Tensor& embed_kernel() const { return w_embed_; }
    const Tensor& embed_bias() const { return b_embed_; }

private:
    EncoderConfig cfg_;
    ParamSet params_;
    Tensor w_embed_, b_embed_;
    Tensor pos_; // constant, not a parameter
    std::vector<TransformerBlock> blocks_;
    Tensor ln_g_, ln_b_;
};

struct DecoderConfig {
    int64_t token_dim = 128;
    int64_t d_model = 128;
    int64_t d_dec = 64;
    int64_t blocks = 2;
    int64_t heads = 4;
    int64_t mlp_ratio = 4;
    int64_t max_tokens = 512;

    static DecoderConfig from(const RunConfig& cfg);
};

// Lighter stack with a learned mask token; rebuilds the full sequence and
// maps every position back to token space. Discarded after pretraining.
class MsmDecoder {
public:
    MsmDecoder(const DecoderConfig& cfg, Rng& rng);

    // latents must come from encode() with the same plan.
    Tensor reconstruct(const Tensor& latents, const MaskPlan& plan) const;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

private:
    DecoderConfig cfg_;
    ParamSet params_;
    Tensor w_proj_, b_proj_, mask_token_;
    Tensor pos_;
    std::vector<TransformerBlock> blocks_;
    Tensor ln_g_, ln_b_, w_head_, b_head_;
};

// MSE over masked token elements only; zero gradient at visible positions.
Tensor msm_loss(const Tensor& recon, const Tensor& target_tokens, const MaskPlan& plan);

} // namespace eegdiff
