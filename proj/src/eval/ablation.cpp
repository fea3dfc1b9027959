#include "eval/ablation.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "io/table.hpp"

namespace eegdiff {

std::vector<AblationRowSpec> default_grid() {
    return {
        {"Full", true, true, 0.75, "E+A"}, {"1", false, false, -1.0, "E+A"},
        {"3", false, true, -1.0, "E+A"},   {"5", true, true, 0.25, "E+A"},
        {"6", true, true, 0.5, "E+A"},     {"7", true, true, 0.85, "E+A"},
        {"12", true, true, 0.75, "E_only"}, {"13", true, false, 0.75, "E+A"},
        {"14", true, false, 0.75, "A_only"},
    };
}

std::vector<AblationRowSpec> parse_grid(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("rows") || !spec.at("rows").is_array()) {
        throw ConfigError("ablation grid must be an object with a 'rows' array");
    }
    std::vector<AblationRowSpec> grid;
    for (const auto& row : spec.at("rows")) {
        AblationRowSpec r;
        r.id = row.at("id").get<std::string>();
        r.msm = row.at("msm").get<bool>();
        r.clip = row.at("clip").get<bool>();
        if (row.contains("mask_ratio") && !row.at("mask_ratio").is_null()) {
            r.mask_ratio = row.at("mask_ratio").get<double>();
            if (r.mask_ratio <= 0.0 || r.mask_ratio >= 1.0) {
                throw ConfigError("ablation row '" + r.id + "' has a mask ratio outside (0, 1)");
            }
        }
        if (r.msm && r.mask_ratio < 0.0) {
            throw ConfigError("ablation row '" + r.id + "' enables pretraining but gives no mask ratio");
        }
        if (row.contains("groups")) r.groups = row.at("groups").get<std::string>();
        grid.push_back(std::move(r));
    }
    if (grid.empty()) throw ConfigError("ablation grid has no rows");
    return grid;
}

namespace {

std::string ratio_cell(double r) {
    if (r < 0.0) return "-";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", r);
    return buf;
}

} // namespace

std::vector<AblationRowResult> run_ablation(const AblationData& data, const std::vector<AblationRowSpec>& grid,
                                            const RunConfig& base, const std::string& out_dir) {
    if (grid.empty()) throw ConfigError("ablation grid has no rows");
    std::filesystem::create_directories(out_dir);

    // stages shared by every row
    std::vector<Tensor> train_images;
    for (const PairedSample& s : data.train.samples) train_images.push_back(s.image);
    TrainAeResult ae = train_autoencoder(train_images, base);
    TrainLdmResult ldm = train_ldm(train_images, ae.checkpoint, base);
    TrainImageEncoderResult imgenc = train_image_encoder(data.train, base);
    ProbeResult probe = train_probe(data.train, base);

    // lazily filled: one pretraining per distinct mask ratio; a failure is
    // charged to the row that requested it
    std::map<double, Checkpoint> pretrained;
    const int64_t per_sample = base.i64("eval.images_per_sample");
    std::vector<AblationRowResult> results;
    CsvWriter csv(out_dir + "/ablation.csv", "row_id,msm,clip,mask_ratio,groups,params,accuracy");
    for (const AblationRowSpec& row : grid) {
        AblationRowResult res;
        res.spec = row;
        try {
            RunConfig cfg = base;
            if (row.mask_ratio > 0.0) cfg.set("msm.mask_ratio", row.mask_ratio);
            cfg.set("finetune.policy", row.groups);
            FinetunePolicy policy =
                FinetunePolicy::from_name(row.groups, row.clip ? base.f64("finetune.lambda_clip") : 0.0);
            if (row.msm && !pretrained.count(row.mask_ratio)) {
                pretrained.emplace(row.mask_ratio, pretrain(data.pretrain, cfg).checkpoint);
            }
            const Checkpoint* eeg = row.msm ? &pretrained.at(row.mask_ratio) : nullptr;
            FinetuneResult ft = finetune(data.train, eeg, ldm.checkpoint, imgenc.checkpoint, policy, cfg);
            for (const CheckpointTensor& t : ft.checkpoint.tensors) res.params += shape_numel(t.shape);

            GenerativeModel model = restore_generative_model(ft.checkpoint, cfg);
            std::vector<Tensor> contexts;
            std::vector<int64_t> labels;
            for (const PairedSample& s : data.test.samples) {
                Tensor ctx = model.context_for(prepare_tokens(s.recording, cfg).tokens);
                for (int64_t r = 0; r < per_sample; ++r) {
                    contexts.push_back(ctx);
                    labels.push_back(s.class_index);
                }
            }
            std::vector<const Tensor*> ctx_ptrs;
            for (const Tensor& c : contexts) ctx_ptrs.push_back(&c);
            Rng sample_rng(mix_seed(cfg.seed(), "ablate-row-" + row.id));
            std::vector<Tensor> images =
                sample_images(ctx_ptrs, *model.denoiser, model.schedule, *model.ae, model.latent_stats, sample_rng);

            const std::string row_dir = out_dir + "/row_" + row.id;
            std::filesystem::create_directories(row_dir);
            CsvWriter index(row_dir + "/index.csv", "sample_id,class,context_source");
            std::vector<LabeledImage> labeled;
            for (size_t i = 0; i < images.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof(name), "sample_%04zu.ppm", i);
                write_ppm(row_dir + "/" + name, images[i]);
                index.row({CsvWriter::num(static_cast<int64_t>(i)),
                           CsvWriter::num(labels[i]), "eeg"});
                labeled.push_back({images[i], labels[i]});
            }
            res.accuracy = nway_accuracy(labeled, *probe.probe);
        } catch (const std::exception& e) {
            res.failed = true;
            res.error = e.what();
            std::cerr << "ablation row " << row.id << " failed: " << e.what() << "\n";
        }
        char acc[24];
        std::snprintf(acc, sizeof(acc), "%.4f", res.accuracy);
        csv.row({row.id, row.msm ? "1" : "0", row.clip ? "1" : "0", ratio_cell(row.mask_ratio), row.groups,
                 CsvWriter::num(res.params), res.failed ? "nan" : acc});
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace eegdiff
