#pragma once

#include "config/config.hpp"
#include "signal/recording.hpp"

namespace eegdiff {

struct CorpusSpec {
    int64_t classes = 8;
    int64_t subjects = 4;
    int64_t pretrain_recordings = 512;
    int64_t train_pairs = 256;
    int64_t test_pairs = 64;
    int64_t image_size = 32;
    int64_t min_channels = 8;
    int64_t max_channels = 32;
    int64_t raw_length = 640;
    double sample_rate_hz = 1000.0;
    double noise_std = 0.3;
    double noise_ar = 0.3;

    static CorpusSpec from(const RunConfig& cfg);
    void validate() const;
};

struct SyntheticCorpus {
    std::vector<EegRecording> pretrain;
    PairedDataset train;
    PairedDataset test;
};

// Class-keyed sinusoid mixtures (frequencies inside the passband) plus a
// subject DC offset and AR(1) noise; images are class-keyed hue + primitive
// patterns with jittered position and scale. Identical seeds reproduce
// identical bytes.
SyntheticCorpus generate_synthetic_corpus(const CorpusSpec& spec, uint64_t seed);

// The three class frequencies used by class k (eval/test helpers reuse them).
std::vector<double> class_frequencies(int64_t k);

// One procedural image; exposed for tests.
Tensor render_class_image(int64_t class_index, int64_t classes, int64_t size, Rng& rng);

} // namespace eegdiff
