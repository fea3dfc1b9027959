#include <doctest.h>

#include <cstdlib>

#include "config/config.hpp"
#include "core/rng.hpp"

using namespace eegdiff;
using nlohmann::json;

TEST_CASE("defaults carry documented values") {
    RunConfig cfg;
    CHECK(cfg.i64("signal.target_length") == 512);
    CHECK(cfg.i64("signal.token_size") == 4);
    CHECK(cfg.f64("msm.mask_ratio") == doctest::Approx(0.75));
    CHECK(cfg.i64("signal.target_channels") == 32);
    CHECK(cfg.str("finetune.policy") == "E+A");
    CHECK(cfg.seed() == 42);
}

TEST_CASE("unknown keys and wrong types are rejected") {
    CHECK_THROWS_AS(merge_config(config_defaults(), json{{"msm.mask_ratioo", 0.5}}, json::object()),
                    ConfigError);
    CHECK_THROWS_AS(merge_config(config_defaults(), json{{"msm.blocks", "four"}}, json::object()), ConfigError);
    CHECK_THROWS_AS(merge_config(config_defaults(), json{{"ae.identity", 1}}, json::object()), ConfigError);
    RunConfig cfg;
    CHECK_THROWS_AS(cfg.i64("nope.nope"), ConfigError);
}

TEST_CASE("precedence holds for every key over random subsets") {
    Rng rng(1234);
    const auto& schema = config_schema();
    std::vector<std::string> keys;
    for (const auto& [k, spec] : schema) keys.push_back(k);

    auto perturb = [&](const std::string& key, int layer) -> json {
        const KeySpec& spec = schema.at(key);
        switch (spec.type) {
        case KeyType::I64:
            return spec.def.get<int64_t>() + layer;
        case KeyType::F64:
            return spec.def.get<double>() + 0.125 * layer;
        case KeyType::Bool:
            return layer % 2 == 0;
        case KeyType::Str:
            return spec.def.get<std::string>() + "#" + std::to_string(layer);
        }
        return nullptr;
    };

    for (int rep = 0; rep < 50; ++rep) {
        json file_layer = json::object();
        json flag_layer = json::object();
        std::map<std::string, int> expect; // 0 = default, 1 = file, 2 = flags
        for (const std::string& k : keys) {
            const int64_t pick = rng.uniform_int(4);
            if (pick == 1 || pick == 3) {
                file_layer[k] = perturb(k, 1);
                expect[k] = 1;
            }
            if (pick >= 2) {
                flag_layer[k] = perturb(k, 2);
                expect[k] = 2;
            }
        }
        json merged = merge_config(config_defaults(), file_layer, flag_layer);
        for (const std::string& k : keys) {
            const int source = expect.count(k) ? expect[k] : 0;
            const json want = source == 0 ? config_defaults().at(k) : perturb(k, source);
            CHECK(merged.at(k) == want);
        }
    }
}

TEST_CASE("DREAM_SEED provides the default root seed but flags win") {
    setenv("DREAM_SEED", "777", 1);
    RunConfig env_cfg;
    CHECK(env_cfg.seed() == 777);
    RunConfig flag_cfg = RunConfig::from_overrides(json{{"run.seed", 5}});
    CHECK(flag_cfg.seed() == 5);
    setenv("DREAM_SEED", "not-a-number", 1);
    CHECK_THROWS_AS(config_defaults(), ConfigError);
    unsetenv("DREAM_SEED");
    RunConfig plain;
    CHECK(plain.seed() == 42);
}

TEST_CASE("override list parsing handles literals and strings") {
    json o = parse_override_list({"msm.blocks=6", "finetune.policy=E_only", "ae.identity=true", "msm.lr=0.5"});
    CHECK(o.at("msm.blocks") == 6);
    CHECK(o.at("finetune.policy") == "E_only");
    CHECK(o.at("ae.identity") == true);
    CHECK(o.at("msm.lr") == 0.5);
    CHECK_THROWS_AS(parse_override_list({"no_equals"}), ConfigError);
}
