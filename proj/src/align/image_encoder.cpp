#include "align/image_encoder.hpp"

#include <memory>
#include <numeric>

#include "io/table.hpp"

namespace eegdiff {

ImageEncoderConfig ImageEncoderConfig::from(const RunConfig& cfg) {
    ImageEncoderConfig m;
    m.image_size = cfg.i64("corpus.image_size");
    m.width = cfg.i64("imgenc.width");
    m.dim = cfg.i64("imgenc.dim");
    m.classes = cfg.i64("corpus.classes");
    return m;
}

ImageEncoder::ImageEncoder(const ImageEncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.image_size % 8 != 0) throw ConfigError("image encoder needs a size divisible by 8");
    const int64_t w = cfg.width;
    auto conv = [&rng](int64_t cout, int64_t cin) {
        return glorot_uniform({cout, cin, 3, 3}, cin * 9, cout * 9, rng);
    };
    c1_ = params_.add("conv1.k", conv(w, 3));
    c1b_ = params_.add("conv1.b", Tensor::zeros({w}));
    c2_ = params_.add("conv2.k", conv(2 * w, w));
    c2b_ = params_.add("conv2.b", Tensor::zeros({2 * w}));
    c3_ = params_.add("conv3.k", conv(2 * w, 2 * w));
    c3b_ = params_.add("conv3.b", Tensor::zeros({2 * w}));
    const int64_t spatial = cfg.image_size / 8;
    const int64_t flat = 2 * w * spatial * spatial;
    fw_ = params_.add("fc.w", glorot_uniform({cfg.dim, flat}, flat, cfg.dim, rng));
    fb_ = params_.add("fc.b", Tensor::zeros({cfg.dim}));
    ow_ = params_.add("out.w", glorot_uniform({cfg.classes, cfg.dim}, cfg.dim, cfg.classes, rng));
    ob_ = params_.add("out.b", Tensor::zeros({cfg.classes}));
}

Tensor ImageEncoder::penultimate(const Tensor& image) const {
    if (image.rank() != 3 || image.extent(0) != 3 || image.extent(1) != cfg_.image_size) {
        throw ShapeError("image encoder expects [3 x " + std::to_string(cfg_.image_size) + " x " +
                         std::to_string(cfg_.image_size) + "]");
    }
    Tensor h = gelu(add_channel_bias(conv2d(image, c1_, 2, 1), c1b_));
    h = gelu(add_channel_bias(conv2d(h, c2_, 2, 1), c2b_));
    h = gelu(add_channel_bias(conv2d(h, c3_, 2, 1), c3b_));
    Tensor flat = reshape(h, {1, h.numel()});
    return linear(flat, fw_, fb_);
}

Tensor ImageEncoder::embed(const Tensor& image) const {
    return l2_normalize(penultimate(image));
}

Tensor ImageEncoder::logits(const Tensor& image) const {
    return linear(gelu(penultimate(image)), ow_, ob_);
}

int64_t ImageEncoder::predict_class(const Tensor& image) const {
    NoTapeGuard guard;
    Tensor l = logits(image);
    int64_t best = 0;
    for (int64_t j = 1; j < l.extent(1); ++j) {
        if (l.at({0, j}) > l.at({0, best})) best = j;
    }
    return best;
}

TrainImageEncoderResult train_image_encoder(const PairedDataset& train, const RunConfig& cfg,
                                            const ImageEncoderConfig& mcfg, const std::string& stream_label,
                                            int64_t epochs, double lr, int64_t batch,
                                            const std::string& log_csv_path) {
    if (train.samples.empty()) throw Error("train_image_encoder: empty dataset");
    Rng stage(mix_seed(cfg.seed(), stream_label));
    Rng init = stage.derive("init");
    ImageEncoder model(mcfg, init);
    ParamSet registry;
    registry.absorb("imgenc", model.params());
    Adam opt(AdamConfig{lr, 0.9, 0.999, 1e-8});
    Rng order_rng = stage.derive("order");
    std::unique_ptr<CsvWriter> log;
    if (!log_csv_path.empty()) log = std::make_unique<CsvWriter>(log_csv_path, "epoch,step,ce_loss");

    const int64_t n = static_cast<int64_t>(train.samples.size());
    int64_t step = 0;
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
                Tensor logit_rows;
                std::vector<int64_t> labels;
                for (int64_t b = 0; b < bsz; ++b) {
                    const PairedSample& s = train.samples[static_cast<size_t>(order[static_cast<size_t>(start + b)])];
                    Tensor l = model.logits(s.image);
                    logit_rows = b == 0 ? l : concat(logit_rows, l, 0);
                    labels.push_back(s.class_index);
                }
                Tensor loss = cross_entropy(logit_rows, labels);
                const double ce = loss.item();
                GradMap grads = tape.backward(loss);
                opt.step(registry, grads);
                if (log) log->row({CsvWriter::num(epoch), CsvWriter::num(step), CsvWriter::num(ce)});
            } catch (const NumericError& e) {
                throw Error("image encoder training diverged at step " + std::to_string(step) + ": " + e.what());
            }
        }
    }

    int64_t correct = 0;
    for (const PairedSample& s : train.samples) {
        if (model.predict_class(s.image) == s.class_index) ++correct;
    }
    TrainImageEncoderResult result;
    result.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    registry.set_all_trainable(false);
    result.checkpoint = make_checkpoint(registry, "train-image-encoder", cfg.seed(), cfg.snapshot());
    return result;
}

TrainImageEncoderResult train_image_encoder(const PairedDataset& train, const RunConfig& cfg,
                                            const std::string& log_csv_path) {
    return train_image_encoder(train, cfg, ImageEncoderConfig::from(cfg), "train-image-encoder",
                               cfg.i64("imgenc.epochs"), cfg.f64("imgenc.lr"), cfg.i64("imgenc.batch_size"),
                               log_csv_path);
}

ImageEncoder restore_image_encoder(const Checkpoint& ckpt, const ImageEncoderConfig& mcfg) {
    Rng dummy(0);
    ImageEncoder model(mcfg, dummy);
    ParamSet registry;
    registry.absorb("imgenc", model.params());
    load_into(ckpt, registry);
    return model;
}

} // namespace eegdiff
