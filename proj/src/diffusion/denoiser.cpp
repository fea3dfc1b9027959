#include "diffusion/denoiser.hpp"

#include <cmath>

namespace eegdiff {

namespace {
Tensor conv_init(int64_t cout, int64_t cin, int64_t k, Rng& rng, double scale = 1.0) {
    Tensor t = glorot_uniform({cout, cin, k, k}, cin * k * k, cout * k * k, rng);
    if (scale != 1.0) {
        for (double& v : t.mutable_data()) v *= scale;
        t.seal("conv_init");
    }
    return t;
}
} // namespace

Tensor time_embedding(int64_t t, int64_t dim) {
    std::vector<double> d(static_cast<size_t>(dim));
    for (int64_t i = 0; i < dim; i += 2) {
        const double rate = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
        d[static_cast<size_t>(i)] = std::sin(static_cast<double>(t) * rate);
        if (i + 1 < dim) d[static_cast<size_t>(i + 1)] = std::cos(static_cast<double>(t) * rate);
    }
    return Tensor::from_data({1, dim}, std::move(d));
}

Tensor channel_layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
    const int64_t c = x.extent(0), h = x.extent(1), w = x.extent(2);
    Tensor rows = transpose(reshape(x, {c, h * w}));           // [HW x C]
    Tensor normed = layer_norm(rows, gamma, beta);
    return reshape(transpose(normed), {c, h, w});
}

DenoiserConfig DenoiserConfig::from(const RunConfig& cfg, const Shape& latent_shape) {
    DenoiserConfig d;
    d.latent_shape = latent_shape;
    d.base_channels = cfg.i64("ldm.base_channels");
    d.attn_dim = cfg.i64("ldm.attn_dim");
    d.context_dim = cfg.i64("ldm.context_dim");
    d.heads = cfg.i64("ldm.heads");
    d.time_dim = cfg.i64("ldm.time_dim");
    return d;
}

ConditionalDenoiser::ResBlock::ResBlock(ParamSet& params, const std::string& prefix, int64_t channels,
                                        int64_t time_dim, Rng& rng) {
    ln1_g = params.add(prefix + ".ln1.g", Tensor::full({channels}, 1.0));
    ln1_b = params.add(prefix + ".ln1.b", Tensor::zeros({channels}));
    k1 = params.add(prefix + ".conv1.k", conv_init(channels, channels, 3, rng));
    b1 = params.add(prefix + ".conv1.b", Tensor::zeros({channels}));
    tw = params.add(prefix + ".time.w", glorot_uniform({channels, time_dim}, time_dim, channels, rng));
    tb = params.add(prefix + ".time.b", Tensor::zeros({channels}));
    ln2_g = params.add(prefix + ".ln2.g", Tensor::full({channels}, 1.0));
    ln2_b = params.add(prefix + ".ln2.b", Tensor::zeros({channels}));
    k2 = params.add(prefix + ".conv2.k", conv_init(channels, channels, 3, rng));
    b2 = params.add(prefix + ".conv2.b", Tensor::zeros({channels}));
}

Tensor ConditionalDenoiser::ResBlock::forward(const Tensor& h, const Tensor& temb) const {
    Tensor a = add_channel_bias(conv2d(gelu(channel_layer_norm(h, ln1_g, ln1_b)), k1, 1, 1), b1);
    Tensor tbias = reshape(linear(temb, tw, tb), {tw.extent(0)});
    a = add_channel_bias(a, tbias);
    a = add_channel_bias(conv2d(gelu(channel_layer_norm(a, ln2_g, ln2_b)), k2, 1, 1), b2);
    return add(h, a);
}

ConditionalDenoiser::LevelAttention::LevelAttention(ParamSet& params, const std::string& prefix,
                                                    int64_t channels, int64_t attn_dim, int64_t context_dim,
                                                    int64_t heads, Rng& rng)
    : heads(heads) {
    w.wq = params.add(prefix + ".wq", glorot_uniform({attn_dim, channels}, channels, attn_dim, rng));
    w.wk = params.add(prefix + ".wk", glorot_uniform({attn_dim, context_dim}, context_dim, attn_dim, rng));
    w.wv = params.add(prefix + ".wv", glorot_uniform({attn_dim, context_dim}, context_dim, attn_dim, rng));
    wo = params.add(prefix + ".wo", glorot_uniform({channels, attn_dim}, attn_dim, channels, rng));
    bo = params.add(prefix + ".bo", Tensor::zeros({channels}));
}

Tensor ConditionalDenoiser::LevelAttention::forward(const Tensor& h, const Tensor& context) const {
    const int64_t c = h.extent(0), hh = h.extent(1), ww = h.extent(2);
    Tensor flat = transpose(reshape(h, {c, hh * ww})); // [HW x C]
    Tensor att = cross_attention(flat, context, w, heads);
    Tensor back = reshape(transpose(linear(att, wo, bo)), {c, hh, ww});
    return add(h, back);
}

ConditionalDenoiser::ConditionalDenoiser(const DenoiserConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.latent_shape.size() != 3) throw ShapeError("denoiser latent must be [C x H x W]");
    if (cfg.latent_shape[1] % 2 != 0 || cfg.latent_shape[2] % 2 != 0) {
        throw ConfigError("denoiser latent spatial extents must be even");
    }
    const int64_t cz = cfg.latent_shape[0];
    const int64_t c1 = cfg.base_channels, c2 = 2 * cfg.base_channels;
    time_w_ = params_.add("time.w1", glorot_uniform({cfg.time_dim, cfg.time_dim}, cfg.time_dim, cfg.time_dim, rng));
    time_b_ = params_.add("time.b1", Tensor::zeros({cfg.time_dim}));
    in_k_ = params_.add("conv_in.k", conv_init(c1, cz, 3, rng));
    in_b_ = params_.add("conv_in.b", Tensor::zeros({c1}));
    res1_ = ResBlock(params_, "res1", c1, cfg.time_dim, rng);
    attn1_ = LevelAttention(params_, "attn1", c1, cfg.attn_dim, cfg.context_dim, cfg.heads, rng);
    down_k_ = params_.add("down.k", conv_init(c2, c1, 3, rng));
    down_b_ = params_.add("down.b", Tensor::zeros({c2}));
    res2_ = ResBlock(params_, "res2", c2, cfg.time_dim, rng);
    attn2_ = LevelAttention(params_, "attn2", c2, cfg.attn_dim, cfg.context_dim, cfg.heads, rng);
    mid_ = ResBlock(params_, "mid", c2, cfg.time_dim, rng);
    up_k_ = params_.add("up.k", conv_init(c1, c2, 3, rng));
    up_b_ = params_.add("up.b", Tensor::zeros({c1}));
    res3_ = ResBlock(params_, "res3", c1, cfg.time_dim, rng);
    out_ln_g_ = params_.add("out_norm.g", Tensor::full({c1}, 1.0));
    out_ln_b_ = params_.add("out_norm.b", Tensor::zeros({c1}));
    out_k_ = params_.add("conv_out.k", conv_init(cz, c1, 3, rng, 0.05)); // near-zero initial prediction
    out_b_ = params_.add("conv_out.b", Tensor::zeros({cz}));
    null_ctx_ = params_.add("null_ctx", Tensor::randn({1, cfg.context_dim}, rng, 0.02));
}

Tensor ConditionalDenoiser::predict(const Tensor& z_t, int64_t t, const Tensor* context) const {
    if (z_t.shape() != cfg_.latent_shape) {
        throw ShapeError("denoiser expects latent " + shape_str(cfg_.latent_shape) + ", got " +
                         shape_str(z_t.shape()));
    }
    const Tensor& ctx = context ? *context : null_ctx_;
    if (ctx.rank() != 2 || ctx.extent(1) != cfg_.context_dim) {
        throw ShapeError("context rows must be [M x " + std::to_string(cfg_.context_dim) + "]");
    }
    Tensor temb = gelu(linear(time_embedding(t, cfg_.time_dim), time_w_, time_b_));
    Tensor h0 = add_channel_bias(conv2d(z_t, in_k_, 1, 1), in_b_);
    h0 = res1_.forward(h0, temb);
    h0 = attn1_.forward(h0, ctx);
    Tensor h1 = add_channel_bias(conv2d(h0, down_k_, 2, 1), down_b_);
    h1 = res2_.forward(h1, temb);
    h1 = attn2_.forward(h1, ctx);
    h1 = mid_.forward(h1, temb);
    Tensor hu = add_channel_bias(conv2d(upsample_nearest2(h1), up_k_, 1, 1), up_b_);
    Tensor h = add(hu, h0);
    h = res3_.forward(h, temb);
    return add_channel_bias(conv2d(gelu(channel_layer_norm(h, out_ln_g_, out_ln_b_)), out_k_, 1, 1), out_b_);
}

bool ConditionalDenoiser::is_attention_head_param(const std::string& name) {
    if (name.rfind("attn", 0) != 0) return false;
    const auto ends_with = [&](const char* suffix) {
        const size_t n = std::string(suffix).size();
        return name.size() >= n && name.compare(name.size() - n, n, suffix) == 0;
    };
    return ends_with(".wq") || ends_with(".wk") || ends_with(".wv");
}

ConditionProjector::ConditionProjector(int64_t d_model, int64_t context_dim, Rng& rng) {
    w_ = params_.add("w", glorot_uniform({context_dim, d_model}, d_model, context_dim, rng));
    b_ = params_.add("b", Tensor::zeros({context_dim}));
}

Tensor ConditionProjector::forward(const Tensor& encoder_rows) const {
    return linear(encoder_rows, w_, b_);
}

} // namespace eegdiff
