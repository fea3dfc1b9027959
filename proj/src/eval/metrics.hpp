#pragma once

#include "align/image_encoder.hpp"

namespace eegdiff {

struct LabeledImage {
    Tensor image;
    int64_t label = 0;
};

struct ProbeResult {
    std::unique_ptr<ImageEncoder> probe;
    double holdout_accuracy = 0.0;
};

// Probe classifier for generation quality: same family as the alignment
// image encoder but a different width and seed stream, trained on the paired
// train images with an internal holdout.
ProbeResult train_probe(const PairedDataset& train, const RunConfig& cfg);

// Fraction of generated images whose probe top-1 matches the conditioning
// recording's ground-truth class.
double nway_accuracy(const std::vector<LabeledImage>& generated, const ImageEncoder& probe);

} // namespace eegdiff
