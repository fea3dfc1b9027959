#include "msm/pretrain.hpp"

#include <memory>
#include <numeric>

#include "io/table.hpp"

namespace eegdiff {

TokenSequence prepare_tokens(const EegRecording& rec, const RunConfig& cfg) {
    EegRecording pre = preprocess(rec, PreprocessConfig::from(cfg));
    return tokenize(pre, cfg.i64("signal.token_size"));
}

PretrainResult pretrain(const std::vector<EegRecording>& recordings, const RunConfig& cfg,
                        const std::string& log_csv_path) {
    if (recordings.empty()) throw Error("pretrain: empty corpus");
    const double mask_ratio = cfg.f64("msm.mask_ratio");
    const int64_t epochs = cfg.i64("msm.epochs");
    const int64_t batch = cfg.i64("msm.batch_size");
    if (epochs < 1 || batch < 1) throw ConfigError("pretrain: epochs and batch size must be positive");

    std::vector<Tensor> tokens;
    tokens.reserve(recordings.size());
    for (const EegRecording& rec : recordings) tokens.push_back(prepare_tokens(rec, cfg).tokens);

    Rng stage(mix_seed(cfg.seed(), "pretrain"));
    Rng enc_rng = stage.derive("encoder-init");
    Rng dec_rng = stage.derive("decoder-init");
    EegEncoder encoder(EncoderConfig::from(cfg), enc_rng);
    MsmDecoder decoder(DecoderConfig::from(cfg), dec_rng);

    ParamSet registry;
    registry.absorb("encoder", encoder.params());
    registry.absorb("decoder", decoder.params());

    Adam opt(AdamConfig{cfg.f64("msm.lr"), 0.9, 0.999, 1e-8});
    Rng order_rng = stage.derive("order");
    Rng mask_rng = stage.derive("mask");

    std::unique_ptr<CsvWriter> log;
    if (!log_csv_path.empty()) log = std::make_unique<CsvWriter>(log_csv_path, "epoch,step,masked_mse");

    PretrainResult result;
    const int64_t n = static_cast<int64_t>(tokens.size());
    const int64_t n_tokens = tokens[0].extent(0);
    int64_t global_step = 0;
    std::vector<double> head, tail;
    for (int64_t epoch = 0; epoch < epochs; ++epoch) {
        std::vector<int64_t> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        for (int64_t i = n - 1; i > 0; --i) {
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(order_rng.uniform_int(i + 1))]);
        }
        for (int64_t start = 0; start < n; start += batch) {
            const int64_t bsz = std::min(batch, n - start);
            ++global_step;
            try {
                Tape tape;
                Tensor total;
                for (int64_t b = 0; b < bsz; ++b) {
                    const Tensor& seq = tokens[static_cast<size_t>(order[static_cast<size_t>(start + b)])];
                    MaskPlan plan = sample_mask(n_tokens, mask_ratio, mask_rng);
                    Tensor latents = encoder.encode(seq, &plan);
                    Tensor recon = decoder.reconstruct(latents, plan);
                    Tensor loss = msm_loss(recon, seq, plan);
                    total = b == 0 ? loss : add(total, loss);
                }
                Tensor step_loss = affine(total, 1.0 / static_cast<double>(bsz), 0.0);
                const double mse = step_loss.item();
                GradMap grads = tape.backward(step_loss);
                opt.step(registry, grads);
                if (log) {
                    log->row({CsvWriter::num(epoch), CsvWriter::num(global_step), CsvWriter::num(mse)});
                }
                if (head.size() < 10) head.push_back(mse);
                tail.push_back(mse);
                if (tail.size() > 10) tail.erase(tail.begin());
            } catch (const NumericError& e) {
                throw Error("pretraining diverged at step " + std::to_string(global_step) + ": " + e.what());
            }
        }
    }
    result.steps = global_step;
    result.initial_masked_mse = std::accumulate(head.begin(), head.end(), 0.0) / static_cast<double>(head.size());
    result.final_masked_mse = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());

    ParamSet encoder_only;
    encoder_only.absorb("encoder", encoder.params());
    encoder_only.set_all_trainable(true);
    result.checkpoint = make_checkpoint(encoder_only, "pretrain", cfg.seed(), cfg.snapshot());
    return result;
}

} // namespace eegdiff
