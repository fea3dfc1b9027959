#include "pipeline/stages.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/precision.hpp"
#include "io/corpus.hpp"
#include "io/table.hpp"
#include "signal/synthetic.hpp"

namespace eegdiff {

void apply_precision(const RunConfig& cfg) {
    const std::string p = cfg.str("run.precision");
    if (p == "f32") {
        set_precision(Precision::F32);
    } else if (p == "f64") {
        set_precision(Precision::F64);
    } else {
        throw ConfigError("run.precision must be f32 or f64, got '" + p + "'");
    }
}

void gen_data_stage(const RunConfig& cfg, const std::string& out_dir) {
    apply_precision(cfg);
    std::filesystem::create_directories(out_dir);
    SyntheticCorpus corpus = generate_synthetic_corpus(CorpusSpec::from(cfg), cfg.seed());
    save_recordings(out_dir + "/pretrain.eegc", corpus.pretrain);
    save_paired(out_dir + "/train.eegc", corpus.train);
    save_paired(out_dir + "/test.eegc", corpus.test);
}

PretrainResult pretrain_stage(const RunConfig& cfg, const std::string& corpus_path,
                              const std::string& ckpt_out, const std::string& log_csv) {
    apply_precision(cfg);
    std::vector<EegRecording> recs = load_recordings(corpus_path);
    PretrainResult res = pretrain(recs, cfg, log_csv);
    save_checkpoint(res.checkpoint, ckpt_out);
    return res;
}

namespace {
std::vector<Tensor> paired_images(const PairedDataset& ds) {
    std::vector<Tensor> images;
    images.reserve(ds.samples.size());
    for (const PairedSample& s : ds.samples) images.push_back(s.image);
    return images;
}
} // namespace

TrainAeResult train_ae_stage(const RunConfig& cfg, const std::string& pairs_path, const std::string& ckpt_out,
                             const std::string& log_csv) {
    apply_precision(cfg);
    PairedDataset ds = load_paired(pairs_path);
    TrainAeResult res = train_autoencoder(paired_images(ds), cfg, log_csv);
    save_checkpoint(res.checkpoint, ckpt_out);
    return res;
}

TrainImageEncoderResult train_image_encoder_stage(const RunConfig& cfg, const std::string& pairs_path,
                                                  const std::string& ckpt_out, const std::string& log_csv) {
    apply_precision(cfg);
    PairedDataset ds = load_paired(pairs_path);
    TrainImageEncoderResult res = train_image_encoder(ds, cfg, log_csv);
    save_checkpoint(res.checkpoint, ckpt_out);
    return res;
}

TrainLdmResult train_ldm_stage(const RunConfig& cfg, const std::string& pairs_path,
                               const std::string& ae_ckpt_path, const std::string& imgenc_ckpt_path,
                               const std::string& ckpt_out, const std::string& log_csv) {
    apply_precision(cfg);
    PairedDataset ds = load_paired(pairs_path);
    Checkpoint ae = load_checkpoint(ae_ckpt_path);
    ImageEncoder imgenc =
        restore_image_encoder(load_checkpoint(imgenc_ckpt_path), ImageEncoderConfig::from(cfg));
    std::vector<Tensor> contexts = image_warmup_contexts(ds, imgenc, cfg);
    TrainLdmResult res = train_ldm(paired_images(ds), contexts, ae, cfg, log_csv);
    save_checkpoint(res.checkpoint, ckpt_out);
    return res;
}

FinetuneResult finetune_stage(const RunConfig& cfg, const std::string& pairs_path,
                              const std::string& eeg_ckpt_path, const std::string& ldm_ckpt_path,
                              const std::string& imgenc_ckpt_path, const std::string& ckpt_out,
                              const std::string& log_csv) {
    apply_precision(cfg);
    PairedDataset ds = load_paired(pairs_path);
    Checkpoint ldm = load_checkpoint(ldm_ckpt_path);
    Checkpoint imgenc = load_checkpoint(imgenc_ckpt_path);
    std::optional<Checkpoint> eeg;
    if (!eeg_ckpt_path.empty()) eeg = load_checkpoint(eeg_ckpt_path);
    FinetuneResult res = finetune(ds, eeg ? &*eeg : nullptr, ldm, imgenc,
                                  FinetunePolicy::from_config(cfg), cfg, log_csv);
    save_checkpoint(res.checkpoint, ckpt_out);
    return res;
}

namespace {

struct GenerationSet {
    std::vector<Tensor> contexts; // empty tensors for null-context entries
    std::vector<int64_t> labels;  // -1 for null-context entries
    std::vector<Tensor> images;
};

GenerationSet generate_images(const RunConfig& cfg, const PairedDataset& ds, const GenerativeModel& model,
                              int64_t n_images, bool unconditional, const std::string& stream_label) {
    GenerationSet out;
    if (unconditional) {
        const int64_t n = n_images > 0 ? n_images : static_cast<int64_t>(ds.samples.size());
        out.labels.assign(static_cast<size_t>(n), -1);
    } else {
        int64_t n = n_images > 0 ? n_images : static_cast<int64_t>(ds.samples.size());
        n = std::min<int64_t>(n, static_cast<int64_t>(ds.samples.size()));
        for (int64_t i = 0; i < n; ++i) {
            const PairedSample& s = ds.samples[static_cast<size_t>(i)];
            out.contexts.push_back(model.context_for(prepare_tokens(s.recording, cfg).tokens));
            out.labels.push_back(s.class_index);
        }
    }
    std::vector<const Tensor*> ctx_ptrs;
    if (unconditional) {
        ctx_ptrs.assign(out.labels.size(), nullptr);
    } else {
        for (const Tensor& c : out.contexts) ctx_ptrs.push_back(&c);
    }
    Rng rng(mix_seed(cfg.seed(), stream_label));
    out.images = sample_images(ctx_ptrs, *model.denoiser, model.schedule, *model.ae, model.latent_stats, rng);
    return out;
}

void write_generation(const std::string& out_dir, const GenerationSet& gen, bool unconditional) {
    std::filesystem::create_directories(out_dir);
    CsvWriter index(out_dir + "/index.csv", "sample_id,class,context_source");
    for (size_t i = 0; i < gen.images.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "sample_%04zu.ppm", i);
        write_ppm(out_dir + "/" + name, gen.images[i]);
        index.row({CsvWriter::num(static_cast<int64_t>(i)), CsvWriter::num(gen.labels[i]),
                   unconditional ? "null" : "eeg"});
    }
}

} // namespace

void generate_stage(const RunConfig& cfg, const std::string& pairs_path, const std::string& model_ckpt_path,
                    const std::string& out_dir, int64_t n_images, bool unconditional) {
    apply_precision(cfg);
    PairedDataset ds = load_paired(pairs_path);
    GenerativeModel model = restore_generative_model(load_checkpoint(model_ckpt_path), cfg);
    GenerationSet gen = generate_images(cfg, ds, model, n_images, unconditional, "generate");
    write_generation(out_dir, gen, unconditional);
}

EvaluateResult evaluate_stage(const RunConfig& cfg, const std::string& test_pairs_path,
                              const std::string& train_pairs_path, const std::string& model_ckpt_path,
                              const std::string& out_dir, int64_t unconditional_samples) {
    apply_precision(cfg);
    PairedDataset test = load_paired(test_pairs_path);
    PairedDataset train = load_paired(train_pairs_path);
    GenerativeModel model = restore_generative_model(load_checkpoint(model_ckpt_path), cfg);
    ProbeResult probe = train_probe(train, cfg);

    std::filesystem::create_directories(out_dir);
    EvaluateResult result;
    result.probe_holdout_accuracy = probe.holdout_accuracy;

    const int64_t per_sample = cfg.i64("eval.images_per_sample");
    // conditional set: per test recording, per repeat
    GenerationSet cond;
    {
        std::vector<const Tensor*> ctx_ptrs;
        for (const PairedSample& s : test.samples) {
            Tensor ctx = model.context_for(prepare_tokens(s.recording, cfg).tokens);
            cond.contexts.push_back(ctx);
        }
        for (size_t i = 0; i < test.samples.size(); ++i) {
            for (int64_t r = 0; r < per_sample; ++r) {
                ctx_ptrs.push_back(&cond.contexts[i]);
                cond.labels.push_back(test.samples[i].class_index);
            }
        }
        Rng rng(mix_seed(cfg.seed(), "evaluate"));
        cond.images = sample_images(ctx_ptrs, *model.denoiser, model.schedule, *model.ae, model.latent_stats, rng);
    }
    write_generation(out_dir + "/conditional", cond, false);

    CsvWriter per_image(out_dir + "/eval.csv", "sample_id,class,predicted,correct,context_source");
    std::vector<LabeledImage> labeled;
    int64_t correct = 0;
    for (size_t i = 0; i < cond.images.size(); ++i) {
        const int64_t pred = probe.probe->predict_class(cond.images[i]);
        const bool ok = pred == cond.labels[i];
        correct += ok ? 1 : 0;
        labeled.push_back({cond.images[i], cond.labels[i]});
        per_image.row({CsvWriter::num(static_cast<int64_t>(i)), CsvWriter::num(cond.labels[i]),
                       CsvWriter::num(pred), ok ? "1" : "0", "eeg"});
    }
    result.conditional_accuracy = nway_accuracy(labeled, *probe.probe);

    if (unconditional_samples > 0) {
        GenerationSet uncond = generate_images(cfg, test, model, unconditional_samples, true, "evaluate-null");
        // balanced labels for the null calibration: cycle the test labels
        std::vector<LabeledImage> null_set;
        for (size_t i = 0; i < uncond.images.size(); ++i) {
            const int64_t label = test.samples[i % test.samples.size()].class_index;
            null_set.push_back({uncond.images[i], label});
        }
        result.unconditional_accuracy = nway_accuracy(null_set, *probe.probe);
        result.unconditional_samples = unconditional_samples;
        write_generation(out_dir + "/unconditional", uncond, true);
    }

    CsvWriter summary(out_dir + "/summary.csv",
                      "conditional_accuracy,unconditional_accuracy,unconditional_samples,probe_holdout");
    char a[24], b[24], c[24];
    std::snprintf(a, sizeof(a), "%.6f", result.conditional_accuracy);
    std::snprintf(b, sizeof(b), "%.6f", result.unconditional_accuracy);
    std::snprintf(c, sizeof(c), "%.6f", result.probe_holdout_accuracy);
    summary.row({a, b, CsvWriter::num(result.unconditional_samples), c});
    return result;
}

std::vector<AblationRowResult> ablate_stage(const RunConfig& cfg, const std::string& grid_json_path,
                                            const std::string& data_dir, const std::string& out_dir) {
    apply_precision(cfg);
    AblationData data;
    data.pretrain = load_recordings(data_dir + "/pretrain.eegc");
    data.train = load_paired(data_dir + "/train.eegc");
    data.test = load_paired(data_dir + "/test.eegc");
    std::vector<AblationRowSpec> grid;
    if (grid_json_path.empty()) {
        grid = default_grid();
    } else {
        std::ifstream f(grid_json_path);
        if (!f) throw IoError("cannot open grid file: " + grid_json_path);
        nlohmann::json spec;
        try {
            f >> spec;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("grid file is not valid JSON: " + std::string(e.what()));
        }
        grid = parse_grid(spec);
    }
    return run_ablation(data, grid, cfg, out_dir);
}

} // namespace eegdiff
