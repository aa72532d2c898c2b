#pragma once

// Engine configuration: one self-describing JSON document whose key names
// mirror the config struct fields. Unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "uiground/http_backend.hpp"
#include "uiground/rewards.hpp"
#include "uiground/stage.hpp"
#include "uiground/synthetic.hpp"

namespace uiground {

struct SyntheticBackendConfig {
    SyntheticModelSpec spec;
    bool has_gt_bbox = false;  // true when the config file pinned a gt box
    bool has_seed = false;     // true when the backend carries its own seed
};

struct HttpBackendConfig {
    HttpOptions options;
};

struct EngineConfig {
    std::uint64_t seed = 0;
    int parallelism = 1;
    AscConfig asc{};      // asc.arp mirrors the top-level arp block
    ArpConfig arp{};
    RewardConfig rewards{};
    std::variant<SyntheticBackendConfig, HttpBackendConfig> backend = SyntheticBackendConfig{};

    void validate() const;
};

EngineConfig parse_engine_config(const nlohmann::json& doc);
EngineConfig load_engine_config(const std::string& path);
nlohmann::json engine_config_to_json(const EngineConfig& cfg);

}  // namespace uiground
