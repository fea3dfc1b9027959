#include "config/config.hpp"

#include <cstdlib>
#include <fstream>

namespace eegdiff {

using nlohmann::json;

const std::map<std::string, KeySpec>& config_schema() {
    static const std::map<std::string, KeySpec> schema = {
        {"run.seed", {KeyType::I64, 42, "root seed; every stage derives its streams from it"}},
        {"run.precision", {KeyType::Str, "f32", "f32 for training, f64 for gradient checks"}},

        {"signal.sample_rate_hz", {KeyType::F64, 1000.0, "sample rate of generated corpora"}},
        {"signal.band_low_hz", {KeyType::F64, 5.0, "bandpass low edge"}},
        {"signal.band_high_hz", {KeyType::F64, 95.0, "bandpass high edge"}},
        {"signal.filter_taps", {KeyType::I64, 101, "FIR length (odd)"}},
        {"signal.target_channels", {KeyType::I64, 32, "channel count after padding"}},
        {"signal.target_length", {KeyType::I64, 512, "time steps after truncation"}},
        {"signal.token_size", {KeyType::I64, 4, "time steps per token"}},

        {"corpus.classes", {KeyType::I64, 8, "number of image/EEG classes"}},
        {"corpus.subjects", {KeyType::I64, 4, "number of synthetic subjects"}},
        {"corpus.pretrain_recordings", {KeyType::I64, 512, "unpaired recordings for pretraining"}},
        {"corpus.train_pairs", {KeyType::I64, 256, "paired train samples"}},
        {"corpus.test_pairs", {KeyType::I64, 64, "paired test samples"}},
        {"corpus.image_size", {KeyType::I64, 32, "generated image side"}},
        {"corpus.min_channels", {KeyType::I64, 8, "lower bound of raw channel counts"}},
        {"corpus.raw_length", {KeyType::I64, 640, "raw recording length before truncation"}},
        {"corpus.noise_std", {KeyType::F64, 0.3, "AR(1) noise amplitude"}},
        {"corpus.noise_ar", {KeyType::F64, 0.3, "AR(1) coefficient"}},

        {"msm.mask_ratio", {KeyType::F64, 0.75, "fraction of tokens hidden during pretraining"}},
        {"msm.d_model", {KeyType::I64, 128, "encoder embedding width"}},
        {"msm.blocks", {KeyType::I64, 4, "encoder transformer depth"}},
        {"msm.heads", {KeyType::I64, 4, "encoder attention heads"}},
        {"msm.mlp_ratio", {KeyType::I64, 4, "encoder MLP expansion"}},
        {"msm.decoder_dim", {KeyType::I64, 64, "reconstruction decoder width"}},
        {"msm.decoder_blocks", {KeyType::I64, 2, "reconstruction decoder depth"}},
        {"msm.decoder_heads", {KeyType::I64, 4, "reconstruction decoder heads"}},
        {"msm.epochs", {KeyType::I64, 16, "pretraining epochs"}},
        {"msm.batch_size", {KeyType::I64, 4, "pretraining batch size"}},
        {"msm.lr", {KeyType::F64, 1e-3, "pretraining learning rate"}},

        {"ae.identity", {KeyType::Bool, false, "bypass the autoencoder (latent = pixels)"}},
        {"ae.latent_channels", {KeyType::I64, 4, "latent channels"}},
        {"ae.base_channels", {KeyType::I64, 16, "autoencoder conv width"}},
        {"ae.epochs", {KeyType::I64, 12, "autoencoder epochs"}},
        {"ae.batch_size", {KeyType::I64, 8, "autoencoder batch size"}},
        {"ae.lr", {KeyType::F64, 2e-3, "autoencoder learning rate"}},
        {"ae.recon_threshold", {KeyType::F64, 0.01, "required train reconstruction MSE"}},

        {"ldm.timesteps", {KeyType::I64, 200, "diffusion steps T"}},
        {"ldm.beta_start", {KeyType::F64, 1e-4, "linear beta schedule start"}},
        {"ldm.beta_end", {KeyType::F64, 0.05, "linear beta schedule end"}},
        {"ldm.base_channels", {KeyType::I64, 48, "denoiser conv width"}},
        {"ldm.attn_dim", {KeyType::I64, 64, "cross-attention dimension d"}},
        {"ldm.context_dim", {KeyType::I64, 64, "conditioning row width d_tau"}},
        {"ldm.heads", {KeyType::I64, 1, "cross-attention heads"}},
        {"ldm.time_dim", {KeyType::I64, 64, "timestep embedding width"}},
        {"ldm.epochs", {KeyType::I64, 48, "unconditional warmup epochs"}},
        {"ldm.batch_size", {KeyType::I64, 8, "warmup batch size"}},
        {"ldm.lr", {KeyType::F64, 1e-3, "warmup learning rate"}},

        {"imgenc.dim", {KeyType::I64, 64, "image embedding dimension"}},
        {"imgenc.width", {KeyType::I64, 16, "image encoder conv width"}},
        {"imgenc.epochs", {KeyType::I64, 12, "image encoder epochs"}},
        {"imgenc.batch_size", {KeyType::I64, 16, "image encoder batch size"}},
        {"imgenc.lr", {KeyType::F64, 2e-3, "image encoder learning rate"}},

        {"finetune.lambda_clip", {KeyType::F64, 1.0, "alignment loss weight"}},
        {"finetune.policy", {KeyType::Str, "E+A", "trainable groups: E+A, E_only or A_only"}},
        {"finetune.pooling", {KeyType::Str, "mean", "context pooling for alignment: mean or first"}},
        {"finetune.epochs", {KeyType::I64, 16, "finetune epochs"}},
        {"finetune.batch_size", {KeyType::I64, 4, "finetune batch size"}},
        {"finetune.lr", {KeyType::F64, 3e-4, "finetune learning rate"}},

        {"eval.probe_width", {KeyType::I64, 24, "probe classifier conv width"}},
        {"eval.probe_epochs", {KeyType::I64, 12, "probe training epochs"}},
        {"eval.probe_lr", {KeyType::F64, 2e-3, "probe learning rate"}},
        {"eval.images_per_sample", {KeyType::I64, 1, "generated images per test recording"}},
        {"eval.unconditional_samples", {KeyType::I64, 200, "null-context samples for calibration"}},
    };
    return schema;
}

namespace {

void check_value(const std::string& key, const KeySpec& spec, const json& v) {
    switch (spec.type) {
    case KeyType::I64:
        if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == std::floor(v.get<double>()))) {
            throw ConfigError("config key '" + key + "' expects an integer");
        }
        break;
    case KeyType::F64:
        if (!v.is_number()) throw ConfigError("config key '" + key + "' expects a number");
        break;
    case KeyType::Bool:
        if (!v.is_boolean()) throw ConfigError("config key '" + key + "' expects a boolean");
        break;
    case KeyType::Str:
        if (!v.is_string()) throw ConfigError("config key '" + key + "' expects a string");
        break;
    }
}

void apply_layer(json& base, const json& layer) {
    if (!layer.is_object()) throw ConfigError("config layer must be a JSON object of flat keys");
    const auto& schema = config_schema();
    for (const auto& [key, value] : layer.items()) {
        auto it = schema.find(key);
        if (it == schema.end()) throw ConfigError("unknown config key '" + key + "'");
        check_value(key, it->second, value);
        base[key] = value;
    }
}

} // namespace

json config_defaults() {
    json d = json::object();
    for (const auto& [key, spec] : config_schema()) d[key] = spec.def;
    if (const char* env = std::getenv("DREAM_SEED")) {
        try {
            d["run.seed"] = static_cast<int64_t>(std::stoull(env));
        } catch (const std::exception&) {
            throw ConfigError("DREAM_SEED must be an unsigned integer");
        }
    }
    return d;
}

json merge_config(const json& defaults, const json& file_values, const json& overrides) {
    json merged = defaults;
    apply_layer(merged, file_values);
    apply_layer(merged, overrides);
    return merged;
}

RunConfig::RunConfig() : values_(config_defaults()) {}

RunConfig::RunConfig(json merged) : values_(std::move(merged)) {}

RunConfig RunConfig::load(const std::string& config_path, const json& overrides) {
    json file_values = json::object();
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw IoError("cannot open config file: " + config_path);
        try {
            f >> file_values;
        } catch (const json::exception& e) {
            throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
        }
    }
    return RunConfig(merge_config(config_defaults(), file_values, overrides));
}

RunConfig RunConfig::from_overrides(const json& overrides) {
    return RunConfig(merge_config(config_defaults(), json::object(), overrides));
}

const json& RunConfig::get_checked(const std::string& key, KeyType expected) const {
    const auto& schema = config_schema();
    auto it = schema.find(key);
    if (it == schema.end()) throw ConfigError("unknown config key '" + key + "'");
    if (it->second.type != expected) throw ConfigError("config key '" + key + "' accessed with wrong type");
    return values_.at(key);
}

int64_t RunConfig::i64(const std::string& key) const {
    return get_checked(key, KeyType::I64).get<int64_t>();
}

double RunConfig::f64(const std::string& key) const {
    const auto& schema = config_schema();
    auto it = schema.find(key);
    if (it == schema.end()) throw ConfigError("unknown config key '" + key + "'");
    return values_.at(key).get<double>();
}

bool RunConfig::flag(const std::string& key) const {
    return get_checked(key, KeyType::Bool).get<bool>();
}

std::string RunConfig::str(const std::string& key) const {
    return get_checked(key, KeyType::Str).get<std::string>();
}

uint64_t RunConfig::seed() const {
    return static_cast<uint64_t>(values_.at("run.seed").get<int64_t>());
}

void RunConfig::set(const std::string& key, const json& value) {
    json layer = json::object();
    layer[key] = value;
    apply_layer(values_, layer);
}

json parse_override_list(const std::vector<std::string>& kvs) {
    json o = json::object();
    for (const std::string& kv : kvs) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override must look like key=value, got '" + kv + "'");
        }
        const std::string key = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::exception&) {
            value = raw; // plain string
        }
        o[key] = value;
    }
    return o;
}

} // namespace eegdiff
