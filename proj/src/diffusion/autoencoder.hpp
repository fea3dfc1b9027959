#pragma once

#include "config/config.hpp"
#include "core/adam.hpp"
#include "core/ops.hpp"
#include "io/checkpoint.hpp"

namespace eegdiff {

struct AeConfig {
    bool identity = false;
    int64_t image_size = 32;
    int64_t latent_channels = 4;
    int64_t base_channels = 16;

    static AeConfig from(const RunConfig& cfg);
};

// Small convolutional autoencoder; two stride-2 stages, so the latent is
// [latent_channels x H/4 x W/4] with a tanh-bounded range. Identity mode
// bypasses it entirely (latent = pixels).
class ImageAutoencoder {
public:
    ImageAutoencoder(const AeConfig& cfg, Rng& rng);

    Tensor encode(const Tensor& image) const;
    Tensor decode(const Tensor& latent) const;

    Shape latent_shape() const;
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    const AeConfig& config() const { return cfg_; }

private:
    AeConfig cfg_;
    ParamSet params_;
    Tensor e1_, e1b_, e2_, e2b_, e3_, e3b_, e4_, e4b_;
    Tensor d1_, d1b_, d2_, d2b_, d3_, d3b_, d4_, d4b_;
};

struct TrainAeResult {
    Checkpoint checkpoint; // every parameter flagged non-trainable
    double final_mse = 0.0;
};

TrainAeResult train_autoencoder(const std::vector<Tensor>& images, const RunConfig& cfg,
                                const std::string& log_csv_path = "");

} // namespace eegdiff
