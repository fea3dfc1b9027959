#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "core/common.hpp"

namespace eegdiff {

enum class KeyType { I64, F64, Bool, Str };

struct KeySpec {
    KeyType type;
    nlohmann::json def;
    const char* doc;
};

// Flat namespaced key table: every tunable across the pipeline, with its
// type, default and one-line description. Unknown keys are rejected.
const std::map<std::string, KeySpec>& config_schema();

// Defaults as a json object. DREAM_SEED, when set, replaces the default of
// run.seed (explicit file/flag values still win).
nlohmann::json config_defaults();

// defaults < file < overrides; validates keys and value types at each layer.
nlohmann::json merge_config(const nlohmann::json& defaults, const nlohmann::json& file_values,
                            const nlohmann::json& overrides);

class RunConfig {
public:
    RunConfig(); // defaults only
    explicit RunConfig(nlohmann::json merged);

    static RunConfig load(const std::string& config_path, const nlohmann::json& overrides);
    static RunConfig from_overrides(const nlohmann::json& overrides);

    int64_t i64(const std::string& key) const;
    double f64(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::string str(const std::string& key) const;
    uint64_t seed() const;

    void set(const std::string& key, const nlohmann::json& value);

    const nlohmann::json& snapshot() const { return values_; }

private:
    const nlohmann::json& get_checked(const std::string& key, KeyType expected) const;
    nlohmann::json values_;
};

// Parses "key=value" with the value as a JSON literal (fallback: string).
nlohmann::json parse_override_list(const std::vector<std::string>& kvs);

} // namespace eegdiff
