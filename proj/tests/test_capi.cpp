#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "eegdiff.h"

namespace {

struct Cfg {
    eegdiff_config* c = eegdiff_config_new();
    ~Cfg() { eegdiff_config_free(c); }
};

std::string tmp_dir() {
    auto p = std::filesystem::temp_directory_path() / "eegdiff_capi_test";
    std::filesystem::create_directories(p);
    return p.string();
}

void write_tiny_config(const std::string& path) {
    std::ofstream f(path);
    f << R"({
        "signal.target_channels": 4, "signal.target_length": 64,
        "corpus.raw_length": 128, "corpus.min_channels": 2, "corpus.classes": 4,
        "corpus.pretrain_recordings": 8, "corpus.train_pairs": 8, "corpus.test_pairs": 4,
        "corpus.image_size": 16,
        "msm.d_model": 32, "msm.blocks": 1, "msm.heads": 2, "msm.mlp_ratio": 2,
        "msm.decoder_dim": 16, "msm.decoder_blocks": 1, "msm.decoder_heads": 2,
        "msm.epochs": 1, "msm.batch_size": 4
    })";
}

} // namespace

TEST_CASE("config handle: defaults, set, get, precedence") {
    Cfg cfg;
    REQUIRE(cfg.c != nullptr);
    char buf[64];

    CHECK(eegdiff_config_get(cfg.c, "msm.mask_ratio", buf, sizeof(buf)) == EEGDIFF_OK);
    CHECK(std::string(buf) == "0.75");

    CHECK(eegdiff_config_set(cfg.c, "msm.mask_ratio", "0.5") == EEGDIFF_OK);
    CHECK(eegdiff_config_get(cfg.c, "msm.mask_ratio", buf, sizeof(buf)) == EEGDIFF_OK);
    CHECK(std::string(buf) == "0.5");

    CHECK(eegdiff_config_set(cfg.c, "finetune.policy", "E_only") == EEGDIFF_OK);
    CHECK(eegdiff_config_get(cfg.c, "finetune.policy", buf, sizeof(buf)) == EEGDIFF_OK);
    CHECK(std::string(buf) == "\"E_only\"");

    // unknown key and wrong type are rejected with messages
    CHECK(eegdiff_config_set(cfg.c, "nope.nope", "1") == EEGDIFF_ERR_CONFIG);
    CHECK(std::strlen(eegdiff_last_error()) > 0);
    CHECK(eegdiff_config_set(cfg.c, "msm.blocks", "\"four\"") == EEGDIFF_ERR_CONFIG);
    CHECK(eegdiff_config_get(cfg.c, "nope.nope", buf, sizeof(buf)) == EEGDIFF_ERR_CONFIG);

    // file layer sits under explicit sets
    const std::string dir = tmp_dir();
    const std::string file = dir + "/layer.json";
    {
        std::ofstream f(file);
        f << R"({"msm.mask_ratio": 0.25, "msm.blocks": 3})";
    }
    CHECK(eegdiff_config_load_file(cfg.c, file.c_str()) == EEGDIFF_OK);
    CHECK(eegdiff_config_get(cfg.c, "msm.blocks", buf, sizeof(buf)) == EEGDIFF_OK);
    CHECK(std::string(buf) == "3"); // from the file
    CHECK(eegdiff_config_get(cfg.c, "msm.mask_ratio", buf, sizeof(buf)) == EEGDIFF_OK);
    CHECK(std::string(buf) == "0.5"); // explicit set still wins

    CHECK(eegdiff_config_load_file(cfg.c, (dir + "/absent.json").c_str()) == EEGDIFF_ERR_IO);

    // null-argument contract
    CHECK(eegdiff_config_set(nullptr, "a", "b") == EEGDIFF_ERR_INVALID_ARGUMENT);
    CHECK(eegdiff_config_get(cfg.c, "msm.blocks", buf, 1) != EEGDIFF_OK);
}

TEST_CASE("stages run through the C surface and map errors to codes") {
    const std::string dir = tmp_dir();
    const std::string cfg_path = dir + "/tiny.json";
    write_tiny_config(cfg_path);

    Cfg cfg;
    REQUIRE(eegdiff_config_load_file(cfg.c, cfg_path.c_str()) == EEGDIFF_OK);

    const std::string data = dir + "/data";
    CHECK(eegdiff_gen_data(cfg.c, data.c_str()) == EEGDIFF_OK);
    CHECK(std::filesystem::exists(data + "/pretrain.eegc"));
    CHECK(std::filesystem::exists(data + "/train.eegc"));
    CHECK(std::filesystem::exists(data + "/test.eegc"));

    const std::string ckpt = dir + "/eeg.ckpt";
    CHECK(eegdiff_pretrain(cfg.c, (data + "/pretrain.eegc").c_str(), ckpt.c_str(), nullptr) == EEGDIFF_OK);
    CHECK(std::filesystem::exists(ckpt));

    // feeding the paired corpus to the plain loader surfaces a format error
    eegdiff_status s = eegdiff_pretrain(cfg.c, (data + "/train.eegc").c_str(), ckpt.c_str(), nullptr);
    CHECK((s == EEGDIFF_ERR_FORMAT || s == EEGDIFF_ERR_IO));

    CHECK(eegdiff_pretrain(cfg.c, (dir + "/missing.eegc").c_str(), ckpt.c_str(), nullptr) == EEGDIFF_ERR_IO);

    // invalid mask ratio ends up as a config/shape error, not a crash
    Cfg bad;
    REQUIRE(eegdiff_config_load_file(bad.c, cfg_path.c_str()) == EEGDIFF_OK);
    REQUIRE(eegdiff_config_set(bad.c, "msm.mask_ratio", "0.001") == EEGDIFF_OK);
    s = eegdiff_pretrain(bad.c, (data + "/pretrain.eegc").c_str(), ckpt.c_str(), nullptr);
    CHECK(s == EEGDIFF_ERR_SHAPE);
    CHECK(std::strlen(eegdiff_last_error()) > 0);
}

TEST_CASE("version string is present") {
    CHECK(std::strlen(eegdiff_version()) > 0);
}
