#include "uiground/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace uiground {

namespace {

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                         const std::string& context) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known |= key == a;
        if (!known)
            throw ValidationError("config: unknown key \"" + key + "\" in " + context);
    }
}

template <typename T>
void read_if(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

PixelBox box_from(const nlohmann::json& arr, const std::string& context) {
    if (!arr.is_array() || arr.size() != 4)
        throw ValidationError("config: " + context + " must be [x1, y1, x2, y2]");
    PixelBox b{arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
               arr[3].get<double>()};
    require_valid(b, context.c_str());
    return b;
}

ArpConfig parse_arp(const nlohmann::json& obj) {
    reject_unknown_keys(obj, {"tau", "k", "connectivity", "min_crop_px", "pad_px"}, "arp");
    ArpConfig cfg;
    read_if(obj, "tau", cfg.tau);
    read_if(obj, "k", cfg.k);
    read_if(obj, "connectivity", cfg.connectivity);
    read_if(obj, "min_crop_px", cfg.min_crop_px);
    read_if(obj, "pad_px", cfg.pad_px);
    cfg.validate();
    return cfg;
}

RewardConfig parse_rewards(const nlohmann::json& obj) {
    reject_unknown_keys(obj, {"alpha", "sigma_floor_px", "beta_kl", "format_profile"}, "rewards");
    RewardConfig cfg;
    read_if(obj, "alpha", cfg.alpha);
    read_if(obj, "sigma_floor_px", cfg.sigma_floor_px);
    read_if(obj, "beta_kl", cfg.beta_kl);
    if (obj.contains("format_profile")) {
        std::string p = obj.at("format_profile").get<std::string>();
        if (p == "tool_call")
            cfg.format_profile = FormatProfile::tool_call_only;
        else if (p == "tool_call_and_point")
            cfg.format_profile = FormatProfile::tool_call_and_point;
        else
            throw ValidationError("config: unknown format_profile \"" + p + "\"");
    }
    cfg.validate();
    return cfg;
}

SyntheticBackendConfig parse_synthetic(const nlohmann::json& obj) {
    reject_unknown_keys(
        obj, {"gt_bbox", "noise_frac", "blob_sigma_px", "tool_policy", "bernoulli_p", "seed", "patch_px"},
        "backend.synthetic");
    SyntheticBackendConfig cfg;
    if (obj.contains("gt_bbox")) {
        cfg.spec.gt_bbox = box_from(obj.at("gt_bbox"), "backend.synthetic.gt_bbox");
        cfg.has_gt_bbox = true;
    }
    if (obj.contains("noise_frac")) {
        const auto& nf = obj.at("noise_frac");
        if (nf.is_number())
            cfg.spec.noise_frac = {nf.get<double>()};
        else if (nf.is_array() && !nf.empty())
            cfg.spec.noise_frac = nf.get<std::vector<double>>();
        else
            throw ValidationError("config: noise_frac must be a number or a non-empty array");
    }
    read_if(obj, "blob_sigma_px", cfg.spec.blob_sigma_px);
    read_if(obj, "bernoulli_p", cfg.spec.bernoulli_p);
    read_if(obj, "patch_px", cfg.spec.patch_px);
    if (obj.contains("seed")) {
        cfg.spec.seed = obj.at("seed").get<std::uint64_t>();
        cfg.has_seed = true;
    }
    if (obj.contains("tool_policy")) {
        const auto& tp = obj.at("tool_policy");
        if (tp.is_string()) {
            std::string p = tp.get<std::string>();
            if (p == "oracle")
                cfg.spec.tool_policy = ToolPolicy::oracle;
            else if (p == "always_yes")
                cfg.spec.tool_policy = ToolPolicy::always_yes;
            else if (p == "always_no")
                cfg.spec.tool_policy = ToolPolicy::always_no;
            else
                throw ValidationError("config: unknown tool_policy \"" + p + "\"");
        } else if (tp.is_object() && tp.contains("bernoulli")) {
            reject_unknown_keys(tp, {"bernoulli"}, "backend.synthetic.tool_policy");
            cfg.spec.tool_policy = ToolPolicy::bernoulli;
            cfg.spec.bernoulli_p = tp.at("bernoulli").get<double>();
        } else {
            throw ValidationError(
                "config: tool_policy must be a string or {\"bernoulli\": p}");
        }
    }
    return cfg;
}

HttpBackendConfig parse_http(const nlohmann::json& obj) {
    reject_unknown_keys(obj, {"endpoint", "connect_timeout_ms", "read_timeout_ms", "max_inflight"},
                        "backend.http");
    HttpBackendConfig cfg;
    if (!obj.contains("endpoint"))
        throw ValidationError("config: backend.http requires \"endpoint\"");
    cfg.options.endpoint = obj.at("endpoint").get<std::string>();
    read_if(obj, "connect_timeout_ms", cfg.options.connect_timeout_ms);
    read_if(obj, "read_timeout_ms", cfg.options.read_timeout_ms);
    read_if(obj, "max_inflight", cfg.options.max_inflight);
    cfg.options.validate();
    return cfg;
}

}  // namespace

void EngineConfig::validate() const {
    if (parallelism < 1) throw ValidationError("config: parallelism must be >= 1");
    asc.validate();
    arp.validate();
    rewards.validate();
    if (const auto* s = std::get_if<SyntheticBackendConfig>(&backend)) s->spec.validate();
    if (const auto* h = std::get_if<HttpBackendConfig>(&backend)) h->options.validate();
}

EngineConfig parse_engine_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("config: document must be a JSON object");
    reject_unknown_keys(doc, {"seed", "parallelism", "asc", "arp", "rewards", "backend"}, "config");

    EngineConfig cfg;
    read_if(doc, "seed", cfg.seed);
    read_if(doc, "parallelism", cfg.parallelism);
    if (doc.contains("arp")) cfg.arp = parse_arp(doc.at("arp"));
    if (doc.contains("asc")) {
        const auto& asc = doc.at("asc");
        reject_unknown_keys(asc, {"max_stages", "force_final_on_budget"}, "asc");
        read_if(asc, "max_stages", cfg.asc.max_stages);
        read_if(asc, "force_final_on_budget", cfg.asc.force_final_on_budget);
    }
    cfg.asc.arp = cfg.arp;
    if (doc.contains("rewards")) cfg.rewards = parse_rewards(doc.at("rewards"));
    if (doc.contains("backend")) {
        const auto& b = doc.at("backend");
        reject_unknown_keys(b, {"synthetic", "http"}, "backend");
        if (b.contains("synthetic") && b.contains("http"))
            throw ValidationError("config: exactly one backend variant may be selected");
        if (b.contains("synthetic"))
            cfg.backend = parse_synthetic(b.at("synthetic"));
        else if (b.contains("http"))
            cfg.backend = parse_http(b.at("http"));
        else
            throw ValidationError("config: backend must hold \"synthetic\" or \"http\"");
    }
    cfg.validate();
    return cfg;
}

EngineConfig load_engine_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw ValidationError("config " + path + ": " + e.what());
    }
    return parse_engine_config(doc);
}

nlohmann::json engine_config_to_json(const EngineConfig& cfg) {
    nlohmann::json doc{
        {"seed", cfg.seed},
        {"parallelism", cfg.parallelism},
        {"asc", {{"max_stages", cfg.asc.max_stages},
                 {"force_final_on_budget", cfg.asc.force_final_on_budget}}},
        {"arp", {{"tau", cfg.arp.tau},
                 {"k", cfg.arp.k},
                 {"connectivity", cfg.arp.connectivity},
                 {"min_crop_px", cfg.arp.min_crop_px},
                 {"pad_px", cfg.arp.pad_px}}},
        {"rewards", {{"alpha", cfg.rewards.alpha},
                     {"sigma_floor_px", cfg.rewards.sigma_floor_px},
                     {"beta_kl", cfg.rewards.beta_kl},
                     {"format_profile",
                      cfg.rewards.format_profile == FormatProfile::tool_call_only
                          ? "tool_call"
                          : "tool_call_and_point"}}},
    };
    if (const auto* s = std::get_if<SyntheticBackendConfig>(&cfg.backend)) {
        nlohmann::json syn{
            {"noise_frac", s->spec.noise_frac},
            {"blob_sigma_px", s->spec.blob_sigma_px},
            {"patch_px", s->spec.patch_px},
        };
        if (s->spec.tool_policy == ToolPolicy::bernoulli)
            syn["tool_policy"] = {{"bernoulli", s->spec.bernoulli_p}};
        else
            syn["tool_policy"] = to_string(s->spec.tool_policy);
        if (s->has_gt_bbox)
            syn["gt_bbox"] = {s->spec.gt_bbox.x1, s->spec.gt_bbox.y1, s->spec.gt_bbox.x2,
                              s->spec.gt_bbox.y2};
        if (s->has_seed) syn["seed"] = s->spec.seed;
        doc["backend"] = {{"synthetic", std::move(syn)}};
    } else if (const auto* h = std::get_if<HttpBackendConfig>(&cfg.backend)) {
        doc["backend"] = {{"http", {{"endpoint", h->options.endpoint},
                                    {"connect_timeout_ms", h->options.connect_timeout_ms},
                                    {"read_timeout_ms", h->options.read_timeout_ms},
                                    {"max_inflight", h->options.max_inflight}}}};
    }
    return doc;
}

}  // namespace uiground
