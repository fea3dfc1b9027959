// eegdiff command-line front end. Links only the C API.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eegdiff.h"

namespace {

struct ConfigDeleter {
    void operator()(eegdiff_config* c) const { eegdiff_config_free(c); }
};
using ConfigPtr = std::unique_ptr<eegdiff_config, ConfigDeleter>;

struct CommonOpts {
    std::string config_path;
    std::string seed;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (flat namespaced keys)");
    cmd->add_option("--seed", opts.seed, "root seed (overrides config and DREAM_SEED)");
    cmd->add_option("--set", opts.sets, "config override key=value (repeatable)")->take_all();
}

int fail(eegdiff_status status) {
    std::fprintf(stderr, "error: %s\n", eegdiff_last_error());
    return status == EEGDIFF_OK ? 0 : 1;
}

// defaults < config file < --set/--seed flags
ConfigPtr build_config(const CommonOpts& opts, eegdiff_status& status) {
    ConfigPtr cfg(eegdiff_config_new());
    status = EEGDIFF_OK;
    if (!cfg) {
        status = EEGDIFF_ERR_INTERNAL;
        return cfg;
    }
    if (!opts.config_path.empty()) {
        status = eegdiff_config_load_file(cfg.get(), opts.config_path.c_str());
        if (status != EEGDIFF_OK) return cfg;
    }
    for (const std::string& kv : opts.sets) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            status = EEGDIFF_ERR_CONFIG;
            return cfg;
        }
        status = eegdiff_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
        if (status != EEGDIFF_OK) return cfg;
    }
    if (!opts.seed.empty()) {
        status = eegdiff_config_set(cfg.get(), "run.seed", opts.seed.c_str());
    }
    return cfg;
}

const char* maybe(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eegdiff: masked-signal pretraining + conditional latent diffusion pipeline"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string corpus, pairs, train, test, out, log, ae, eeg, ldm, imgenc, model, grid, data;
    int64_t n_images = 0, uncond_samples = 0;
    bool unconditional = false;

    auto* gen_data = app.add_subcommand("gen-data", "generate the synthetic paired corpus");
    add_common(gen_data, opts);
    gen_data->add_option("--out", out, "output directory")->required();

    auto* pretrain = app.add_subcommand("pretrain", "masked-signal pretraining of the EEG encoder");
    add_common(pretrain, opts);
    pretrain->add_option("--corpus", corpus, "pretraining corpus file")->required();
    pretrain->add_option("--out", out, "output checkpoint")->required();
    pretrain->add_option("--log", log, "training log csv");

    auto* train_ae = app.add_subcommand("train-ae", "train the image autoencoder");
    add_common(train_ae, opts);
    train_ae->add_option("--pairs", pairs, "paired train corpus")->required();
    train_ae->add_option("--out", out, "output checkpoint")->required();
    train_ae->add_option("--log", log, "training log csv");

    auto* train_imgenc = app.add_subcommand("train-image-encoder", "train the frozen image embedding");
    add_common(train_imgenc, opts);
    train_imgenc->add_option("--pairs", pairs, "paired train corpus")->required();
    train_imgenc->add_option("--out", out, "output checkpoint")->required();
    train_imgenc->add_option("--log", log, "training log csv");

    auto* train_ldm = app.add_subcommand("train-ldm", "unconditional diffusion warmup");
    add_common(train_ldm, opts);
    train_ldm->add_option("--pairs", pairs, "paired train corpus")->required();
    train_ldm->add_option("--ae", ae, "autoencoder checkpoint")->required();
    train_ldm->add_option("--out", out, "output checkpoint")->required();
    train_ldm->add_option("--log", log, "training log csv");

    auto* finetune = app.add_subcommand("finetune", "conditional fine-tuning with alignment");
    add_common(finetune, opts);
    finetune->add_option("--pairs", pairs, "paired train corpus")->required();
    finetune->add_option("--eeg", eeg, "pretrained encoder checkpoint (omit for random init)");
    finetune->add_option("--ldm", ldm, "diffusion warmup checkpoint")->required();
    finetune->add_option("--imgenc", imgenc, "image encoder checkpoint")->required();
    finetune->add_option("--out", out, "output checkpoint")->required();
    finetune->add_option("--log", log, "training log csv");

    auto* generate = app.add_subcommand("generate", "sample images from EEG conditions");
    add_common(generate, opts);
    generate->add_option("--pairs", pairs, "paired corpus providing the conditions")->required();
    generate->add_option("--model", model, "finetuned model checkpoint")->required();
    generate->add_option("--out", out, "output directory")->required();
    generate->add_option("--n", n_images, "number of images (default: one per sample)");
    generate->add_flag("--unconditional", unconditional, "sample with the null context");

    auto* evaluate = app.add_subcommand("evaluate", "top-1 accuracy of generated images");
    add_common(evaluate, opts);
    evaluate->add_option("--test", test, "paired test corpus")->required();
    evaluate->add_option("--train", train, "paired train corpus (probe training)")->required();
    evaluate->add_option("--model", model, "finetuned model checkpoint")->required();
    evaluate->add_option("--out", out, "output directory")->required();
    evaluate->add_option("--unconditional", uncond_samples, "null-context samples for calibration");

    auto* ablate = app.add_subcommand("ablate", "run the ablation grid");
    add_common(ablate, opts);
    ablate->add_option("--grid", grid, "grid json (default: built-in grid)");
    ablate->add_option("--data", data, "directory with pretrain/train/test corpora")->required();
    ablate->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    }

    eegdiff_status status = EEGDIFF_OK;
    ConfigPtr cfg = build_config(opts, status);
    if (status != EEGDIFF_OK) return fail(status);

    if (gen_data->parsed()) {
        status = eegdiff_gen_data(cfg.get(), out.c_str());
        if (status == EEGDIFF_OK) std::printf("corpus written to %s\n", out.c_str());
    } else if (pretrain->parsed()) {
        status = eegdiff_pretrain(cfg.get(), corpus.c_str(), out.c_str(), maybe(log));
        if (status == EEGDIFF_OK) std::printf("encoder checkpoint written to %s\n", out.c_str());
    } else if (train_ae->parsed()) {
        status = eegdiff_train_ae(cfg.get(), pairs.c_str(), out.c_str(), maybe(log));
        if (status == EEGDIFF_OK) std::printf("autoencoder checkpoint written to %s\n", out.c_str());
    } else if (train_imgenc->parsed()) {
        status = eegdiff_train_image_encoder(cfg.get(), pairs.c_str(), out.c_str(), maybe(log));
        if (status == EEGDIFF_OK) std::printf("image encoder checkpoint written to %s\n", out.c_str());
    } else if (train_ldm->parsed()) {
        status = eegdiff_train_ldm(cfg.get(), pairs.c_str(), ae.c_str(), out.c_str(), maybe(log));
        if (status == EEGDIFF_OK) std::printf("diffusion checkpoint written to %s\n", out.c_str());
    } else if (finetune->parsed()) {
        status = eegdiff_finetune(cfg.get(), pairs.c_str(), maybe(eeg), ldm.c_str(), imgenc.c_str(),
                                  out.c_str(), maybe(log));
        if (status == EEGDIFF_OK) std::printf("model checkpoint written to %s\n", out.c_str());
    } else if (generate->parsed()) {
        status = eegdiff_generate(cfg.get(), pairs.c_str(), model.c_str(), out.c_str(), n_images,
                                  unconditional ? 1 : 0);
        if (status == EEGDIFF_OK) std::printf("samples written to %s\n", out.c_str());
    } else if (evaluate->parsed()) {
        double acc = 0.0, uncond_acc = 0.0;
        status = eegdiff_evaluate(cfg.get(), test.c_str(), train.c_str(), model.c_str(), out.c_str(),
                                  uncond_samples, &acc, &uncond_acc);
        if (status == EEGDIFF_OK) {
            std::printf("conditional top-1 accuracy: %.4f\n", acc);
            if (uncond_samples > 0) std::printf("unconditional top-1 accuracy: %.4f\n", uncond_acc);
        }
    } else if (ablate->parsed()) {
        status = eegdiff_ablate(cfg.get(), maybe(grid), data.c_str(), out.c_str());
        if (status == EEGDIFF_OK) std::printf("ablation table written to %s/ablation.csv\n", out.c_str());
    }

    return status == EEGDIFF_OK ? 0 : fail(status);
}
