#pragma once

#include "core/ops.hpp"
#include "core/params.hpp"

namespace eegdiff {

// Projection h from pooled conditioning rows into the image-embedding space.
class AlignmentHead {
public:
    AlignmentHead(int64_t context_dim, int64_t embed_dim, Rng& rng);

    Tensor forward(const Tensor& pooled) const; // [1 x d_tau] -> [1 x d_clip]

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

private:
    ParamSet params_;
    Tensor w_, b_;
};

enum class ContextPooling { Mean, FirstToken };

ContextPooling pooling_from_string(const std::string& s);

// Pool the conditioning rows, project through h, L2-normalize. Flags a zero
// vector rather than dividing by it.
Tensor eeg_clip_embedding(const Tensor& context_rows, const AlignmentHead& head,
                          ContextPooling pooling = ContextPooling::Mean);

// 1 - cosine similarity; symmetric and invariant to positive rescaling of
// either argument. Range [0, 2].
Tensor clip_loss(const Tensor& eeg_emb, const Tensor& img_emb);

} // namespace eegdiff
