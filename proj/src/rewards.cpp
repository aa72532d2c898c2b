#include "uiground/rewards.hpp"

#include <cmath>
#include <regex>

#include "uiground/stage.hpp"

namespace uiground {

void RewardConfig::validate() const {
    if (!(alpha > 0.0)) throw ValidationError("RewardConfig: alpha must be > 0");
    if (!(sigma_floor_px > 0.0)) throw ValidationError("RewardConfig: sigma_floor_px must be > 0");
}

namespace {

int count_tool_call_spans(std::string_view text, bool& content_ok) {
    constexpr std::string_view open = "<tool_call>";
    constexpr std::string_view close = "</tool_call>";
    int spans = 0;
    content_ok = false;
    std::size_t pos = 0;
    while (true) {
        auto start = text.find(open, pos);
        if (start == std::string_view::npos) break;
        auto end = text.find(close, start + open.size());
        if (end == std::string_view::npos) break;
        ++spans;
        if (spans == 1)
            content_ok = parse_tool_call(text.substr(start)) != ToolCall::absent;
        pos = end + close.size();
    }
    return spans;
}

bool has_point_pattern(const std::string& text) {
    static const std::regex pattern(R"(\(\s*-?\d+(\.\d+)?\s*,\s*-?\d+(\.\d+)?\s*\))");
    return std::regex_search(text, pattern);
}

}  // namespace

Rollout Rollout::from_text(std::string raw_text, PixelPoint point, PixelBox gt_bbox,
                           const RewardConfig& cfg) {
    Rollout r;
    r.raw_text = std::move(raw_text);
    r.tool_call = parse_tool_call(r.raw_text);
    r.point = point;
    r.gt_bbox = gt_bbox;
    r.format_ok = format_reward(r, cfg) == 1.0;
    return r;
}

double point_reward(const Rollout& r, const RewardConfig& cfg) {
    cfg.validate();
    require_valid(r.gt_bbox, "point_reward.gt_bbox");
    if (!std::isfinite(r.point.x) || !std::isfinite(r.point.y))
        throw ValidationError("point_reward: point must be finite");
    PixelPoint c = r.gt_bbox.center();
    double sx = std::max(cfg.alpha * r.gt_bbox.width(), cfg.sigma_floor_px);
    double sy = std::max(cfg.alpha * r.gt_bbox.height(), cfg.sigma_floor_px);
    double dx = (r.point.x - c.x) / sx;
    double dy = (r.point.y - c.y) / sy;
    return std::exp(-0.5 * (dx * dx + dy * dy));
}

double tool_reward(const Rollout& r) {
    if (r.tool_call == ToolCall::absent) return 0.0;
    bool inside = point_in_box(r.point, r.gt_bbox);
    bool said_no = r.tool_call == ToolCall::no;
    return (said_no && inside) || (!said_no && !inside) ? 1.0 : 0.0;
}

double format_reward(const Rollout& r, const RewardConfig& cfg) {
    bool content_ok = false;
    int spans = count_tool_call_spans(r.raw_text, content_ok);
    if (spans != 1 || !content_ok) return 0.0;
    if (cfg.format_profile == FormatProfile::tool_call_and_point && !has_point_pattern(r.raw_text))
        return 0.0;
    return 1.0;
}

double total_reward(const Rollout& r, const RewardConfig& cfg) {
    return format_reward(r, cfg) + tool_reward(r) + point_reward(r, cfg);
}

std::vector<double> group_advantages(const std::vector<double>& rewards) {
    if (rewards.size() < 2)
        throw ValidationError("group_advantages: group size must be >= 2, got " +
                              std::to_string(rewards.size()));
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(rewards.size());
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= static_cast<double>(rewards.size());  // population variance
    double denom = std::sqrt(var) + 1e-6;
    std::vector<double> adv(rewards.size());
    for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = (rewards[i] - mean) / denom;
    return adv;
}

}  // namespace uiground
