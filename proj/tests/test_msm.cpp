#include <doctest.h>

#include <cmath>

#include "core/precision.hpp"
#include "msm/pretrain.hpp"
#include "signal/synthetic.hpp"

using namespace eegdiff;
using nlohmann::json;

namespace {

RunConfig tiny_cfg() {
    return RunConfig::from_overrides(json{
        {"signal.target_channels", 4},
        {"signal.target_length", 64},
        {"corpus.raw_length", 128},
        {"corpus.min_channels", 2},
        {"msm.d_model", 32},
        {"msm.blocks", 2},
        {"msm.heads", 2},
        {"msm.mlp_ratio", 2},
        {"msm.decoder_dim", 16},
        {"msm.decoder_blocks", 1},
        {"msm.decoder_heads", 2},
        {"msm.epochs", 10},
        {"msm.batch_size", 4},
        {"msm.lr", 3e-3},
    });
}

Tensor random_tokens(int64_t n, int64_t dim, uint64_t seed) {
    Rng rng(seed);
    return Tensor::randn({n, dim}, rng);
}

} // namespace

TEST_CASE("sample_mask yields exact deterministic counts") {
    Rng rng(1);
    MaskPlan plan = sample_mask(128, 0.75, rng);
    CHECK(plan.masked.size() == 96); // floor(0.75 * 128)
    CHECK(plan.visible.size() == 32);

    MaskPlan half = sample_mask(4, 0.5, rng);
    CHECK(half.masked.size() == 2);
    CHECK(half.visible.size() == 2);

    MaskPlan extreme = sample_mask(4, 0.999, rng);
    CHECK(extreme.masked.size() == 3);

    CHECK_THROWS_AS(sample_mask(4, 0.1, rng), ShapeError);  // floor = 0
    CHECK_THROWS_AS(sample_mask(10, 0.0, rng), ShapeError);
    CHECK_THROWS_AS(sample_mask(10, 1.0, rng), ShapeError);
}

TEST_CASE("masked fraction equals floor(ratio*n)/n for every swept ratio") {
    Rng rng(2);
    for (double ratio : {0.25, 0.5, 0.75, 0.85}) {
        for (int64_t n : {16, 100, 128}) {
            MaskPlan plan = sample_mask(n, ratio, rng);
            CHECK(static_cast<int64_t>(plan.masked.size()) ==
                  static_cast<int64_t>(std::floor(ratio * static_cast<double>(n))));
        }
    }
}

TEST_CASE("mask sampling is uniform-ish: every index gets masked across draws") {
    Rng rng(3);
    std::vector<int> hits(16, 0);
    for (int rep = 0; rep < 200; ++rep) {
        MaskPlan plan = sample_mask(16, 0.5, rng);
        for (int64_t i : plan.masked) hits[static_cast<size_t>(i)]++;
    }
    for (int h : hits) {
        CHECK(h > 50);
        CHECK(h < 150);
    }
}

TEST_CASE("encode returns one row per visible token") {
    RunConfig cfg = tiny_cfg();
    Rng rng(5);
    EegEncoder enc(EncoderConfig::from(cfg), rng);
    Tensor tokens = random_tokens(16, 16, 7);

    MaskPlan nearly_all;
    nearly_all.n_tokens = 16;
    nearly_all.mask_ratio = 0.9;
    for (int64_t i = 0; i < 15; ++i) nearly_all.masked.push_back(i);
    nearly_all.visible = {15};
    Tensor one = enc.encode(tokens, &nearly_all);
    CHECK(one.extent(0) == 1);
    CHECK(one.extent(1) == 32);

    Tensor all = enc.encode(tokens);
    CHECK(all.extent(0) == 16);
}

TEST_CASE("paper-scale geometry: 512/4 = 128 tokens flow through unmasked") {
    RunConfig cfg = RunConfig::from_overrides(json{
        {"msm.d_model", 32}, {"msm.blocks", 1}, {"msm.heads", 2}, {"msm.mlp_ratio", 1}});
    Rng rng(6);
    EegEncoder enc(EncoderConfig::from(cfg), rng);
    Tensor tokens = random_tokens(128, 128, 8);
    Tensor out = enc.encode(tokens);
    CHECK(out.extent(0) == 128);
}

TEST_CASE("encoder output is equivariant under joint (token, position) permutation") {
    RunConfig cfg = tiny_cfg();
    Rng rng(9);
    EegEncoder enc(EncoderConfig::from(cfg), rng);
    Tensor tokens = random_tokens(16, 16, 11);

    MaskPlan a;
    a.n_tokens = 16;
    a.mask_ratio = 0.5;
    a.masked = {0, 2, 4, 6, 8, 10, 12, 14};
    a.visible = {1, 3, 5, 7, 9, 11, 13, 15};

    MaskPlan b = a;
    // permute the visible processing order (same set, different row order)
    b.visible = {9, 3, 15, 1, 13, 7, 5, 11};

    Tensor ya = enc.encode(tokens, &a);
    Tensor yb = enc.encode(tokens, &b);
    // row for original position p must be identical in both encodings
    for (size_t ra = 0; ra < a.visible.size(); ++ra) {
        const int64_t p = a.visible[ra];
        size_t rb = 0;
        while (b.visible[rb] != p) ++rb;
        for (int64_t j = 0; j < ya.extent(1); ++j) {
            CHECK(ya.at({static_cast<int64_t>(ra), j}) ==
                  doctest::Approx(yb.at({static_cast<int64_t>(rb), j})).epsilon(1e-5));
        }
    }
}

TEST_CASE("token embedding equals the stride-token 1-d convolution") {
    RunConfig cfg = tiny_cfg();
    Rng rng(13);
    EegEncoder enc(EncoderConfig::from(cfg), rng);
    // a random recording in preprocessed geometry
    Rng data_rng(14);
    EegRecording rec;
    rec.samples = Tensor::randn({4, 64}, data_rng);
    rec.sample_rate_hz = 1000.0;
    TokenSequence seq = tokenize(rec, 4);

    // embedding path: tokens * W^T + b
    Tensor emb = linear(seq.tokens, enc.embed_kernel(), enc.embed_bias());

    // convolution path: kernels[d_model, C, S] from the same weights
    const int64_t d_model = 32, c = 4, s = 4;
    std::vector<double> k(static_cast<size_t>(d_model * c * s));
    for (int64_t o = 0; o < d_model; ++o)
        for (int64_t ch = 0; ch < c; ++ch)
            for (int64_t t = 0; t < s; ++t)
                k[static_cast<size_t>((o * c + ch) * s + t)] = enc.embed_kernel().at({o, ch * s + t});
    Tensor conv = conv1d(rec.samples, Tensor::from_data({d_model, c, s}, std::move(k)), s);
    Tensor conv_rows = transpose(conv); // [N x d_model]
    for (int64_t i = 0; i < emb.extent(0); ++i)
        for (int64_t j = 0; j < emb.extent(1); ++j)
            CHECK(emb.at({i, j}) - enc.embed_bias().at({j}) ==
                  doctest::Approx(conv_rows.at({i, j})).epsilon(1e-6));
}

TEST_CASE("reconstruct emits full-length token rows regardless of mask ratio") {
    RunConfig cfg = tiny_cfg();
    Rng rng(15);
    EegEncoder enc(EncoderConfig::from(cfg), rng);
    MsmDecoder dec(DecoderConfig::from(cfg), rng);
    Tensor tokens = random_tokens(16, 16, 17);
    Rng mask_rng(18);
    for (double ratio : {0.25, 0.5, 0.75, 0.85}) {
        MaskPlan plan = sample_mask(16, ratio, mask_rng);
        Tensor recon = dec.reconstruct(enc.encode(tokens, &plan), plan);
        CHECK(recon.extent(0) == 16);
        CHECK(recon.extent(1) == 16);
    }
}

TEST_CASE("zeroed head produces an all-zero reconstruction") {
    RunConfig cfg = tiny_cfg();
    Rng rng(19);
    EegEncoder enc(EncoderConfig::from(cfg), rng);
    MsmDecoder dec(DecoderConfig::from(cfg), rng);
    for (double& v : dec.params().at("head.w").tensor.mutable_data()) v = 0.0;
    for (double& v : dec.params().at("head.b").tensor.mutable_data()) v = 0.0;
    Tensor tokens = random_tokens(16, 16, 21);
    Rng mask_rng(22);
    MaskPlan plan = sample_mask(16, 0.75, mask_rng);
    Tensor recon = dec.reconstruct(enc.encode(tokens, &plan), plan);
    for (double v : recon.data()) CHECK(v == 0.0);
}

TEST_CASE("reconstruct validates plan/latent consistency") {
    RunConfig cfg = tiny_cfg();
    Rng rng(23);
    EegEncoder enc(EncoderConfig::from(cfg), rng);
    MsmDecoder dec(DecoderConfig::from(cfg), rng);
    Tensor tokens = random_tokens(16, 16, 24);
    Rng mask_rng(25);
    MaskPlan plan = sample_mask(16, 0.5, mask_rng);
    MaskPlan other = sample_mask(16, 0.75, mask_rng);
    Tensor latents = enc.encode(tokens, &plan);
    CHECK_THROWS_AS(dec.reconstruct(latents, other), ShapeError);
}

TEST_CASE("msm_loss: zero at target, masked-only, unit for unit diff") {
    Rng mask_rng(27);
    MaskPlan plan = sample_mask(8, 0.5, mask_rng);
    Tensor target = random_tokens(8, 6, 28);

    CHECK(msm_loss(target, target, plan).item() == 0.0);

    // perturb only visible rows: loss must stay exactly zero
    std::vector<double> perturbed = target.data();
    for (int64_t v : plan.visible)
        for (int64_t j = 0; j < 6; ++j) perturbed[static_cast<size_t>(v * 6 + j)] += 123.0;
    Tensor visible_only = Tensor::from_data({8, 6}, std::move(perturbed));
    CHECK(msm_loss(visible_only, target, plan).item() == 0.0);

    // one masked token with an all-ones difference
    MaskPlan single;
    single.n_tokens = 8;
    single.mask_ratio = 0.12;
    single.masked = {3};
    for (int64_t i = 0; i < 8; ++i)
        if (i != 3) single.visible.push_back(i);
    std::vector<double> plus = target.data();
    for (int64_t j = 0; j < 6; ++j) plus[static_cast<size_t>(3 * 6 + j)] += 1.0;
    CHECK(msm_loss(Tensor::from_data({8, 6}, std::move(plus)), target, single).item() ==
          doctest::Approx(1.0));
}

TEST_CASE("msm_loss gradient is exactly zero at every visible position") {
    Rng mask_rng(31);
    MaskPlan plan = sample_mask(12, 0.75, mask_rng);
    Tensor target = random_tokens(12, 5, 32);
    Tensor recon = random_tokens(12, 5, 33);
    recon.set_requires_grad(true);
    Tape tape;
    Tensor loss = msm_loss(recon, target, plan);
    GradMap grads = tape.backward(loss);
    const Tensor& g = grads.at(recon);
    for (int64_t i = 0; i < 12; ++i) {
        const bool masked = plan.is_masked(i);
        double row_abs = 0.0;
        for (int64_t j = 0; j < 5; ++j) row_abs += std::abs(g.at({i, j}));
        if (masked) {
            CHECK(row_abs > 0.0);
        } else {
            CHECK(row_abs == 0.0);
        }
    }
}

TEST_CASE("pretraining is deterministic, reduces the loss, and drops the decoder") {
    RunConfig cfg = tiny_cfg();
    CorpusSpec spec = CorpusSpec::from(cfg);
    spec.pretrain_recordings = 16;
    spec.train_pairs = 2;
    spec.test_pairs = 2;
    SyntheticCorpus corpus = generate_synthetic_corpus(spec, cfg.seed());

    PretrainResult a = pretrain(corpus.pretrain, cfg);
    PretrainResult b = pretrain(corpus.pretrain, cfg);
    CHECK(encode_checkpoint(a.checkpoint) == encode_checkpoint(b.checkpoint));
    CHECK(a.initial_masked_mse == b.initial_masked_mse);
    CHECK(a.final_masked_mse == b.final_masked_mse);

    CHECK(a.final_masked_mse < a.initial_masked_mse);

    for (const CheckpointTensor& t : a.checkpoint.tensors) {
        CHECK(t.name.rfind("encoder.", 0) == 0);
        CHECK(t.trainable);
    }
    CHECK(a.checkpoint.meta.at("stage") == "pretrain");
    // full configuration and seed are recoverable from the checkpoint
    CHECK(a.checkpoint.meta.at("seed") == cfg.seed());
    CHECK(a.checkpoint.meta.at("config") == cfg.snapshot());
}
