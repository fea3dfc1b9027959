#include "eval/metrics.hpp"

namespace eegdiff {

ProbeResult train_probe(const PairedDataset& train, const RunConfig& cfg) {
    if (train.samples.empty()) throw Error("train_probe: empty dataset");
    const int64_t n = static_cast<int64_t>(train.samples.size());
    const int64_t holdout = std::max<int64_t>(1, n / 5);
    PairedDataset fit;
    fit.split = "probe-fit";
    fit.class_count = train.class_count;
    PairedDataset held;
    held.split = "probe-holdout";
    held.class_count = train.class_count;
    for (int64_t i = 0; i < n; ++i) {
        (i < n - holdout ? fit : held).samples.push_back(train.samples[static_cast<size_t>(i)]);
    }

    ImageEncoderConfig mcfg = ImageEncoderConfig::from(cfg);
    mcfg.width = cfg.i64("eval.probe_width");
    TrainImageEncoderResult trained =
        train_image_encoder(fit, cfg, mcfg, "probe", cfg.i64("eval.probe_epochs"), cfg.f64("eval.probe_lr"),
                            cfg.i64("imgenc.batch_size"));

    ProbeResult result;
    result.probe = std::make_unique<ImageEncoder>(restore_image_encoder(trained.checkpoint, mcfg));
    int64_t correct = 0;
    for (const PairedSample& s : held.samples) {
        if (result.probe->predict_class(s.image) == s.class_index) ++correct;
    }
    result.holdout_accuracy = static_cast<double>(correct) / static_cast<double>(held.samples.size());
    return result;
}

double nway_accuracy(const std::vector<LabeledImage>& generated, const ImageEncoder& probe) {
    if (generated.empty()) throw Error("nway_accuracy: empty evaluation set");
    int64_t correct = 0;
    for (const LabeledImage& g : generated) {
        if (g.label < 0 || g.label >= probe.config().classes) {
            throw ShapeError("nway_accuracy: label " + std::to_string(g.label) + " out of range");
        }
        if (probe.predict_class(g.image) == g.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(generated.size());
}

} // namespace eegdiff
