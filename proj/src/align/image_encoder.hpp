#pragma once

#include "config/config.hpp"
#include "core/adam.hpp"
#include "core/ops.hpp"
#include "io/checkpoint.hpp"
#include "signal/recording.hpp"

namespace eegdiff {

struct ImageEncoderConfig {
    int64_t image_size = 32;
    int64_t width = 16;
    int64_t dim = 64; // embedding dimension
    int64_t classes = 8;

    static ImageEncoderConfig from(const RunConfig& cfg);
};

// Small convolutional classifier. embed() is the L2-normalized penultimate
// layer; the same architecture (at a different width and seed) also serves
// as the evaluation probe.
class ImageEncoder {
public:
    ImageEncoder(const ImageEncoderConfig& cfg, Rng& rng);

    Tensor penultimate(const Tensor& image) const; // [1 x dim]
    Tensor embed(const Tensor& image) const;       // [1 x dim], unit norm
    Tensor logits(const Tensor& image) const;      // [1 x classes]
    int64_t predict_class(const Tensor& image) const;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    const ImageEncoderConfig& config() const { return cfg_; }

private:
    ImageEncoderConfig cfg_;
    ParamSet params_;
    Tensor c1_, c1b_, c2_, c2b_, c3_, c3b_;
    Tensor fw_, fb_; // flatten -> dim
    Tensor ow_, ob_; // dim -> classes
};

struct TrainImageEncoderResult {
    Checkpoint checkpoint; // all parameters frozen
    double train_accuracy = 0.0;
};

// Cross-entropy training on the paired images; rng streams derive from
// `stream_label` so the alignment encoder and the probe never share a seed.
TrainImageEncoderResult train_image_encoder(const PairedDataset& train, const RunConfig& cfg,
                                            const ImageEncoderConfig& mcfg, const std::string& stream_label,
                                            int64_t epochs, double lr, int64_t batch,
                                            const std::string& log_csv_path = "");

// Convenience wrapper using the imgenc.* config block.
TrainImageEncoderResult train_image_encoder(const PairedDataset& train, const RunConfig& cfg,
                                            const std::string& log_csv_path = "");

ImageEncoder restore_image_encoder(const Checkpoint& ckpt, const ImageEncoderConfig& mcfg);

// One [1 x d_tau] warmup context row per paired image: the frozen embedding
// itself. Requires imgenc.dim == ldm.context_dim.
std::vector<Tensor> image_warmup_contexts(const PairedDataset& ds, const ImageEncoder& imgenc,
                                          const RunConfig& cfg);

} // namespace eegdiff
