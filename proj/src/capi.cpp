#include "eegdiff.h"

#include <cstring>
#include <fstream>

#include "pipeline/stages.hpp"

using namespace eegdiff;

struct eegdiff_config {
    nlohmann::json file_layer = nlohmann::json::object();
    nlohmann::json override_layer = nlohmann::json::object();

    RunConfig materialize() const {
        return RunConfig(merge_config(config_defaults(), file_layer, override_layer));
    }
};

namespace {

thread_local std::string t_last_error;

const char* store_error(const std::string& msg) {
    t_last_error = msg;
    return t_last_error.c_str();
}

template <typename Fn>
eegdiff_status guarded(Fn&& fn) {
    try {
        fn();
        return EEGDIFF_OK;
    } catch (const ConfigError& e) {
        store_error(e.what());
        return EEGDIFF_ERR_CONFIG;
    } catch (const ShapeError& e) {
        store_error(e.what());
        return EEGDIFF_ERR_SHAPE;
    } catch (const NumericError& e) {
        store_error(e.what());
        return EEGDIFF_ERR_NUMERIC;
    } catch (const FormatError& e) {
        store_error(e.what());
        return EEGDIFF_ERR_FORMAT;
    } catch (const IoError& e) {
        store_error(e.what());
        return EEGDIFF_ERR_IO;
    } catch (const Error& e) {
        store_error(e.what());
        return EEGDIFF_ERR_INTERNAL;
    } catch (const std::exception& e) {
        store_error(e.what());
        return EEGDIFF_ERR_INTERNAL;
    }
}

eegdiff_status require(bool ok, const char* what) {
    if (ok) return EEGDIFF_OK;
    store_error(std::string("invalid argument: ") + what);
    return EEGDIFF_ERR_INVALID_ARGUMENT;
}

std::string opt(const char* s) { return s ? std::string(s) : std::string(); }

} // namespace

extern "C" {

eegdiff_config* eegdiff_config_new(void) {
    return new (std::nothrow) eegdiff_config();
}

void eegdiff_config_free(eegdiff_config* cfg) {
    delete cfg;
}

eegdiff_status eegdiff_config_load_file(eegdiff_config* cfg, const char* path) {
    if (eegdiff_status s = require(cfg && path, "config and path must be non-null")) return s;
    return guarded([&] {
        std::ifstream f(path);
        if (!f) throw IoError(std::string("cannot open config file: ") + path);
        nlohmann::json values;
        try {
            f >> values;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
        }
        // validate before adopting
        merge_config(config_defaults(), values, nlohmann::json::object());
        for (const auto& [k, v] : values.items()) cfg->file_layer[k] = v;
    });
}

eegdiff_status eegdiff_config_set(eegdiff_config* cfg, const char* key, const char* value) {
    if (eegdiff_status s = require(cfg && key && value, "config, key and value must be non-null")) return s;
    return guarded([&] {
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(value);
        } catch (const nlohmann::json::exception&) {
            parsed = std::string(value);
        }
        nlohmann::json layer = nlohmann::json::object();
        layer[key] = parsed;
        // validate key and type before adopting
        merge_config(config_defaults(), nlohmann::json::object(), layer);
        cfg->override_layer[key] = parsed;
    });
}

eegdiff_status eegdiff_config_get(const eegdiff_config* cfg, const char* key, char* buf, size_t buf_size) {
    if (eegdiff_status s = require(cfg && key && buf && buf_size > 0, "all arguments must be non-null")) {
        return s;
    }
    return guarded([&] {
        RunConfig rc = cfg->materialize();
        const auto& snapshot = rc.snapshot();
        if (!snapshot.contains(key)) throw ConfigError(std::string("unknown config key '") + key + "'");
        const std::string text = snapshot.at(key).dump();
        if (text.size() + 1 > buf_size) {
            throw Error("buffer too small: need " + std::to_string(text.size() + 1) + " bytes");
        }
        std::memcpy(buf, text.c_str(), text.size() + 1);
    });
}

const char* eegdiff_last_error(void) {
    return t_last_error.c_str();
}

const char* eegdiff_version(void) {
    return "0.1.0";
}

eegdiff_status eegdiff_gen_data(const eegdiff_config* cfg, const char* out_dir) {
    if (eegdiff_status s = require(cfg && out_dir, "config and out_dir must be non-null")) return s;
    return guarded([&] { gen_data_stage(cfg->materialize(), out_dir); });
}

eegdiff_status eegdiff_pretrain(const eegdiff_config* cfg, const char* corpus_path,
                                const char* checkpoint_out, const char* log_csv) {
    if (eegdiff_status s = require(cfg && corpus_path && checkpoint_out, "corpus and checkpoint paths required")) {
        return s;
    }
    return guarded([&] { pretrain_stage(cfg->materialize(), corpus_path, checkpoint_out, opt(log_csv)); });
}

eegdiff_status eegdiff_train_ae(const eegdiff_config* cfg, const char* pairs_path, const char* checkpoint_out,
                                const char* log_csv) {
    if (eegdiff_status s = require(cfg && pairs_path && checkpoint_out, "pairs and checkpoint paths required")) {
        return s;
    }
    return guarded([&] { train_ae_stage(cfg->materialize(), pairs_path, checkpoint_out, opt(log_csv)); });
}

eegdiff_status eegdiff_train_image_encoder(const eegdiff_config* cfg, const char* pairs_path,
                                           const char* checkpoint_out, const char* log_csv) {
    if (eegdiff_status s = require(cfg && pairs_path && checkpoint_out, "pairs and checkpoint paths required")) {
        return s;
    }
    return guarded(
        [&] { train_image_encoder_stage(cfg->materialize(), pairs_path, checkpoint_out, opt(log_csv)); });
}

eegdiff_status eegdiff_train_ldm(const eegdiff_config* cfg, const char* pairs_path, const char* ae_checkpoint,
                                 const char* checkpoint_out, const char* log_csv) {
    if (eegdiff_status s =
            require(cfg && pairs_path && ae_checkpoint && checkpoint_out, "pairs, ae and output paths required")) {
        return s;
    }
    return guarded(
        [&] { train_ldm_stage(cfg->materialize(), pairs_path, ae_checkpoint, checkpoint_out, opt(log_csv)); });
}

eegdiff_status eegdiff_finetune(const eegdiff_config* cfg, const char* pairs_path, const char* eeg_checkpoint,
                                const char* ldm_checkpoint, const char* imgenc_checkpoint,
                                const char* checkpoint_out, const char* log_csv) {
    if (eegdiff_status s = require(cfg && pairs_path && ldm_checkpoint && imgenc_checkpoint && checkpoint_out,
                                   "pairs, ldm, imgenc and output paths required")) {
        return s;
    }
    return guarded([&] {
        finetune_stage(cfg->materialize(), pairs_path, opt(eeg_checkpoint), ldm_checkpoint, imgenc_checkpoint,
                       checkpoint_out, opt(log_csv));
    });
}

eegdiff_status eegdiff_generate(const eegdiff_config* cfg, const char* pairs_path,
                                const char* model_checkpoint, const char* out_dir, int64_t n_images,
                                int unconditional) {
    if (eegdiff_status s = require(cfg && pairs_path && model_checkpoint && out_dir,
                                   "pairs, model and output paths required")) {
        return s;
    }
    return guarded([&] {
        generate_stage(cfg->materialize(), pairs_path, model_checkpoint, out_dir, n_images,
                       unconditional != 0);
    });
}

eegdiff_status eegdiff_evaluate(const eegdiff_config* cfg, const char* test_pairs, const char* train_pairs,
                                const char* model_checkpoint, const char* out_dir,
                                int64_t unconditional_samples, double* accuracy_out,
                                double* unconditional_accuracy_out) {
    if (eegdiff_status s = require(cfg && test_pairs && train_pairs && model_checkpoint && out_dir,
                                   "test, train, model and output paths required")) {
        return s;
    }
    return guarded([&] {
        EvaluateResult res = evaluate_stage(cfg->materialize(), test_pairs, train_pairs, model_checkpoint,
                                            out_dir, unconditional_samples);
        if (accuracy_out) *accuracy_out = res.conditional_accuracy;
        if (unconditional_accuracy_out) *unconditional_accuracy_out = res.unconditional_accuracy;
    });
}

eegdiff_status eegdiff_ablate(const eegdiff_config* cfg, const char* grid_json, const char* data_dir,
                              const char* out_dir) {
    if (eegdiff_status s = require(cfg && data_dir && out_dir, "data and output directories required")) return s;
    return guarded([&] { ablate_stage(cfg->materialize(), opt(grid_json), data_dir, out_dir); });
}

} // extern "C"
