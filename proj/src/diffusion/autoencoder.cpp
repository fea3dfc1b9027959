#include "diffusion/autoencoder.hpp"

#include <memory>
#include <numeric>

#include "io/table.hpp"

namespace eegdiff {

namespace {
Tensor conv_init(int64_t cout, int64_t cin, int64_t k, Rng& rng) {
    return glorot_uniform({cout, cin, k, k}, cin * k * k, cout * k * k, rng);
}
} // namespace

AeConfig AeConfig::from(const RunConfig& cfg) {
    AeConfig a;
    a.identity = cfg.flag("ae.identity");
    a.image_size = cfg.i64("corpus.image_size");
    a.latent_channels = cfg.i64("ae.latent_channels");
    a.base_channels = cfg.i64("ae.base_channels");
    return a;
}

ImageAutoencoder::ImageAutoencoder(const AeConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.identity) return;
    if (cfg.image_size % 4 != 0) throw ConfigError("autoencoder image size must be divisible by 4");
    const int64_t w = cfg.base_channels;
    e1_ = params_.add("enc1.k", conv_init(w, 3, 3, rng));
    e1b_ = params_.add("enc1.b", Tensor::zeros({w}));
    e2_ = params_.add("enc2.k", conv_init(2 * w, w, 3, rng));
    e2b_ = params_.add("enc2.b", Tensor::zeros({2 * w}));
    e3_ = params_.add("enc3.k", conv_init(2 * w, 2 * w, 3, rng));
    e3b_ = params_.add("enc3.b", Tensor::zeros({2 * w}));
    e4_ = params_.add("enc4.k", conv_init(cfg.latent_channels, 2 * w, 3, rng));
    e4b_ = params_.add("enc4.b", Tensor::zeros({cfg.latent_channels}));
    d1_ = params_.add("dec1.k", conv_init(2 * w, cfg.latent_channels, 3, rng));
    d1b_ = params_.add("dec1.b", Tensor::zeros({2 * w}));
    d2_ = params_.add("dec2.k", conv_init(2 * w, 2 * w, 3, rng));
    d2b_ = params_.add("dec2.b", Tensor::zeros({2 * w}));
    d3_ = params_.add("dec3.k", conv_init(w, 2 * w, 3, rng));
    d3b_ = params_.add("dec3.b", Tensor::zeros({w}));
    d4_ = params_.add("dec4.k", conv_init(3, w, 3, rng));
    d4b_ = params_.add("dec4.b", Tensor::zeros({3}));
}

Tensor ImageAutoencoder::encode(const Tensor& image) const {
    if (image.rank() != 3 || image.extent(0) != 3) throw ShapeError("autoencoder expects [3 x H x W]");
    if (cfg_.identity) return image;
    Tensor h = gelu(add_channel_bias(conv2d(image, e1_, 1, 1), e1b_));
    h = gelu(add_channel_bias(conv2d(h, e2_, 2, 1), e2b_));
    h = gelu(add_channel_bias(conv2d(h, e3_, 2, 1), e3b_));
    return tanh(add_channel_bias(conv2d(h, e4_, 1, 1), e4b_));
}

Tensor ImageAutoencoder::decode(const Tensor& latent) const {
    if (cfg_.identity) return latent;
    Tensor h = gelu(add_channel_bias(conv2d(latent, d1_, 1, 1), d1b_));
    h = gelu(add_channel_bias(conv2d(upsample_nearest2(h), d2_, 1, 1), d2b_));
    h = gelu(add_channel_bias(conv2d(upsample_nearest2(h), d3_, 1, 1), d3b_));
    return sigmoid(add_channel_bias(conv2d(h, d4_, 1, 1), d4b_));
}

Shape ImageAutoencoder::latent_shape() const {
    if (cfg_.identity) return {3, cfg_.image_size, cfg_.image_size};
    return {cfg_.latent_channels, cfg_.image_size / 4, cfg_.image_size / 4};
}

TrainAeResult train_autoencoder(const std::vector<Tensor>& images, const RunConfig& cfg,
                                const std::string& log_csv_path) {
    if (images.empty()) throw Error("train_autoencoder: no images");
    AeConfig acfg = AeConfig::from(cfg);
    Rng stage(mix_seed(cfg.seed(), "train-ae"));
    Rng init = stage.derive("init");
    ImageAutoencoder ae(acfg, init);

    ParamSet registry;
    registry.absorb("ae", ae.params());

    TrainAeResult result;
    if (!acfg.identity) {
        Adam opt(AdamConfig{cfg.f64("ae.lr"), 0.9, 0.999, 1e-8});
        Rng order_rng = stage.derive("order");
        const int64_t epochs = cfg.i64("ae.epochs");
        const int64_t batch = cfg.i64("ae.batch_size");
        const int64_t n = static_cast<int64_t>(images.size());
        std::unique_ptr<CsvWriter> log;
        if (!log_csv_path.empty()) log = std::make_unique<CsvWriter>(log_csv_path, "epoch,step,mse");
        int64_t step = 0;
        for (int64_t epoch = 0; epoch < epochs; ++epoch) {
            std::vector<int64_t> order(static_cast<size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            for (int64_t i = n - 1; i > 0; --i) {
                std::swap(order[static_cast<size_t>(i)],
                          order[static_cast<size_t>(order_rng.uniform_int(i + 1))]);
            }
            for (int64_t start = 0; start < n; start += batch) {
                const int64_t bsz = std::min(batch, n - start);
                ++step;
                try {
                    Tape tape;
                    Tensor total;
                    for (int64_t b = 0; b < bsz; ++b) {
                        const Tensor& img = images[static_cast<size_t>(order[static_cast<size_t>(start + b)])];
                        Tensor diff = sub(ae.decode(ae.encode(img)), img);
                        Tensor loss = mean(mul(diff, diff));
                        total = b == 0 ? loss : add(total, loss);
                    }
                    Tensor step_loss = affine(total, 1.0 / static_cast<double>(bsz), 0.0);
                    const double mse = step_loss.item();
                    GradMap grads = tape.backward(step_loss);
                    opt.step(registry, grads);
                    if (log) log->row({CsvWriter::num(epoch), CsvWriter::num(step), CsvWriter::num(mse)});
                } catch (const NumericError& e) {
                    throw Error("autoencoder training diverged at step " + std::to_string(step) + ": " +
                                e.what());
                }
            }
        }
        // final reconstruction error over the training set
        NoTapeGuard guard;
        double total = 0.0;
        for (const Tensor& img : images) {
            Tensor diff = sub(ae.decode(ae.encode(img)), img);
            total += mean(mul(diff, diff)).item();
        }
        result.final_mse = total / static_cast<double>(images.size());
    }

    registry.set_all_trainable(false); // frozen for every downstream stage
    result.checkpoint = make_checkpoint(registry, "train-ae", cfg.seed(), cfg.snapshot());
    return result;
}

} // namespace eegdiff
