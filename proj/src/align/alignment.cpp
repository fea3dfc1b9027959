#include "align/alignment.hpp"

namespace eegdiff {

AlignmentHead::AlignmentHead(int64_t context_dim, int64_t embed_dim, Rng& rng) {
    w_ = params_.add("w", glorot_uniform({embed_dim, context_dim}, context_dim, embed_dim, rng));
    b_ = params_.add("b", Tensor::zeros({embed_dim}));
}

Tensor AlignmentHead::forward(const Tensor& pooled) const {
    return linear(pooled, w_, b_);
}

ContextPooling pooling_from_string(const std::string& s) {
    if (s == "mean") return ContextPooling::Mean;
    if (s == "first") return ContextPooling::FirstToken;
    throw ConfigError("unknown pooling mode '" + s + "' (expected mean or first)");
}

Tensor eeg_clip_embedding(const Tensor& context_rows, const AlignmentHead& head, ContextPooling pooling) {
    if (context_rows.rank() != 2) throw ShapeError("eeg_clip_embedding expects [M x d_tau] rows");
    Tensor pooled =
        pooling == ContextPooling::Mean ? mean_rows(context_rows) : slice(context_rows, 0, 0, 1);
    return l2_normalize(head.forward(pooled));
}

Tensor clip_loss(const Tensor& eeg_emb, const Tensor& img_emb) {
    if (eeg_emb.numel() != img_emb.numel()) {
        throw ShapeError("clip_loss: embedding dimensions differ (" + shape_str(eeg_emb.shape()) + " vs " +
                         shape_str(img_emb.shape()) + ")");
    }
    Tensor a = l2_normalize(reshape(eeg_emb, {1, eeg_emb.numel()}));
    Tensor b = l2_normalize(reshape(img_emb, {1, img_emb.numel()}));
    return affine(sum(mul(a, b)), -1.0, 1.0);
}

} // namespace eegdiff
