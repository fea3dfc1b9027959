#include "signal/synthetic.hpp"

#include <cmath>

namespace eegdiff {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

void hsv_to_rgb(double h, double s, double v, double rgb[3]) {
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) {
        r = c; g = x;
    } else if (hp < 2) {
        r = x; g = c;
    } else if (hp < 3) {
        g = c; b = x;
    } else if (hp < 4) {
        g = x; b = c;
    } else if (hp < 5) {
        r = x; b = c;
    } else {
        r = c; b = x;
    }
    const double m = v - c;
    rgb[0] = r + m;
    rgb[1] = g + m;
    rgb[2] = b + m;
}

// soft membership of pixel (px, py) for primitive `kind` centered at
// (cx, cy) with radius r; 1 inside, 0 outside, ~1px soft edge
double primitive_coverage(int kind, double px, double py, double cx, double cy, double r) {
    const double dx = px - cx, dy = py - cy;
    auto soft = [](double signed_dist) {
        return std::clamp(0.5 - signed_dist, 0.0, 1.0); // signed_dist in pixels
    };
    switch (kind) {
    case 0: // disc
        return soft(std::sqrt(dx * dx + dy * dy) - r);
    case 1: // square
        return soft(std::max(std::abs(dx), std::abs(dy)) - r);
    case 2: { // triangle (upward)
        const double d1 = -dy - r * 0.8;                                // below top
        const double d2 = 0.866 * dx + 0.5 * dy - r * 0.5;              // right edge
        const double d3 = -0.866 * dx + 0.5 * dy - r * 0.5;             // left edge
        return soft(std::max({d1, d2, d3}));
    }
    case 3: // diamond
        return soft((std::abs(dx) + std::abs(dy)) - r);
    case 4: { // ring
        const double d = std::abs(std::sqrt(dx * dx + dy * dy) - 0.75 * r) - 0.32 * r;
        return soft(d);
    }
    case 5: { // cross
        const double dbar1 = std::max(std::abs(dx) - 0.33 * r, std::abs(dy) - r);
        const double dbar2 = std::max(std::abs(dy) - 0.33 * r, std::abs(dx) - r);
        return soft(std::min(dbar1, dbar2));
    }
    case 6: // horizontal bar
        return soft(std::max(std::abs(dy) - 0.4 * r, std::abs(dx) - r));
    default: // vertical bar
        return soft(std::max(std::abs(dx) - 0.4 * r, std::abs(dy) - r));
    }
}

} // namespace

CorpusSpec CorpusSpec::from(const RunConfig& cfg) {
    CorpusSpec s;
    s.classes = cfg.i64("corpus.classes");
    s.subjects = cfg.i64("corpus.subjects");
    s.pretrain_recordings = cfg.i64("corpus.pretrain_recordings");
    s.train_pairs = cfg.i64("corpus.train_pairs");
    s.test_pairs = cfg.i64("corpus.test_pairs");
    s.image_size = cfg.i64("corpus.image_size");
    s.min_channels = cfg.i64("corpus.min_channels");
    s.max_channels = cfg.i64("signal.target_channels");
    s.raw_length = cfg.i64("corpus.raw_length");
    s.sample_rate_hz = cfg.f64("signal.sample_rate_hz");
    s.noise_std = cfg.f64("corpus.noise_std");
    s.noise_ar = cfg.f64("corpus.noise_ar");
    return s;
}

void CorpusSpec::validate() const {
    if (classes < 2) throw ConfigError("corpus needs at least 2 classes");
    if (subjects < 1) throw ConfigError("corpus needs at least 1 subject");
    if (pretrain_recordings < 1 || train_pairs < 1 || test_pairs < 1) {
        throw ConfigError("corpus sample counts must be positive");
    }
    if (image_size < 8) throw ConfigError("image size must be at least 8");
    if (min_channels < 1 || min_channels > max_channels) {
        throw ConfigError("invalid channel range for corpus generation");
    }
    if (raw_length < 1) throw ConfigError("raw recording length must be positive");
    if (noise_std < 0.0) throw ConfigError("noise amplitude must be non-negative");
    if (noise_ar < 0.0 || noise_ar >= 1.0) throw ConfigError("AR(1) coefficient must be in [0, 1)");
    if (sample_rate_hz <= 0.0) throw ConfigError("sample rate must be positive");
}

std::vector<double> class_frequencies(int64_t k) {
    // spaced 6 Hz apart, all well inside the 5-95 Hz band at fs = 1000
    return {14.0 + 6.0 * static_cast<double>(k % 8), 16.0 + 6.0 * static_cast<double>(k % 8),
            41.0 + 2.5 * static_cast<double>(k % 8)};
}

Tensor render_class_image(int64_t class_index, int64_t classes, int64_t size, Rng& rng) {
    const double hue = static_cast<double>(class_index) / static_cast<double>(classes);
    double fg[3];
    hsv_to_rgb(hue, 0.85, 0.92, fg);
    const double bg = 0.12;
    const int kind = static_cast<int>(class_index % 8);
    const double jx = rng.uniform(-0.10, 0.10) * static_cast<double>(size);
    const double jy = rng.uniform(-0.10, 0.10) * static_cast<double>(size);
    const double r = rng.uniform(0.26, 0.36) * static_cast<double>(size);
    const double cx = size / 2.0 + jx, cy = size / 2.0 + jy;
    std::vector<double> img(static_cast<size_t>(3 * size * size));
    for (int64_t i = 0; i < size; ++i) {
        for (int64_t j = 0; j < size; ++j) {
            const double cov = primitive_coverage(kind, j + 0.5, i + 0.5, cx, cy, r);
            for (int64_t c = 0; c < 3; ++c) {
                img[static_cast<size_t>((c * size + i) * size + j)] = bg + cov * (fg[c] - bg);
            }
        }
    }
    return Tensor::from_data({3, size, size}, std::move(img));
}

namespace {

EegRecording synth_recording(const CorpusSpec& spec, int64_t class_index, uint32_t subject, int64_t channels,
                             Rng& rng) {
    const int64_t l = spec.raw_length;
    const double fs = spec.sample_rate_hz;
    const std::vector<double> freqs = class_frequencies(class_index);
    const double amps[3] = {1.0, 0.8, 0.6};
    // per-sample phase jitter, shared across channels
    double phases[3];
    for (int j = 0; j < 3; ++j) phases[j] = rng.uniform(0.0, kTwoPi);
    const double subject_offset =
        0.4 * (static_cast<double>(subject) - (static_cast<double>(spec.subjects) - 1.0) / 2.0);
    std::vector<double> data(static_cast<size_t>(channels * l));
    for (int64_t ch = 0; ch < channels; ++ch) {
        const double theta = 0.35 * static_cast<double>(ch);
        double noise = 0.0;
        for (int64_t t = 0; t < l; ++t) {
            double v = subject_offset;
            for (int j = 0; j < 3; ++j) {
                v += amps[j] * std::sin(kTwoPi * freqs[static_cast<size_t>(j)] * t / fs + phases[j] + theta);
            }
            noise = spec.noise_ar * noise + spec.noise_std * rng.normal();
            data[static_cast<size_t>(ch * l + t)] = v + noise;
        }
    }
    EegRecording rec;
    rec.samples = Tensor::from_data({channels, l}, std::move(data));
    rec.sample_rate_hz = fs;
    rec.subject_id = subject;
    rec.label = static_cast<int32_t>(class_index);
    return rec;
}

PairedDataset synth_paired(const CorpusSpec& spec, uint64_t seed, const std::string& split, int64_t count) {
    PairedDataset ds;
    ds.split = split;
    ds.class_count = spec.classes;
    Rng base(mix_seed(seed, split));
    for (int64_t i = 0; i < count; ++i) {
        Rng rec_rng = base.derive(static_cast<uint64_t>(2 * i));
        Rng img_rng = base.derive(static_cast<uint64_t>(2 * i + 1));
        PairedSample s;
        const int64_t cls = i % spec.classes;
        const uint32_t subject = static_cast<uint32_t>(i % spec.subjects);
        s.recording = synth_recording(spec, cls, subject, spec.max_channels, rec_rng);
        s.image = render_class_image(cls, spec.classes, spec.image_size, img_rng);
        s.class_index = static_cast<int32_t>(cls);
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace

SyntheticCorpus generate_synthetic_corpus(const CorpusSpec& spec, uint64_t seed) {
    spec.validate();
    SyntheticCorpus corpus;
    Rng base(mix_seed(seed, "pretrain"));
    for (int64_t i = 0; i < spec.pretrain_recordings; ++i) {
        Rng rec_rng = base.derive(static_cast<uint64_t>(i));
        const int64_t cls = i % spec.classes;
        const uint32_t subject = static_cast<uint32_t>(i % spec.subjects);
        const int64_t channels = spec.min_channels + rec_rng.uniform_int(spec.max_channels - spec.min_channels + 1);
        EegRecording rec = synth_recording(spec, cls, subject, channels, rec_rng);
        rec.label = -1; // the pretraining corpus plays the unlabeled role
        corpus.pretrain.push_back(std::move(rec));
    }
    corpus.train = synth_paired(spec, seed, "train", spec.train_pairs);
    corpus.test = synth_paired(spec, seed, "test", spec.test_pairs);
    return corpus;
}

} // namespace eegdiff
