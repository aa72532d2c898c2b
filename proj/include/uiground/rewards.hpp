#pragma once

// Rule-based reward suite for policy-optimization rollouts: format, tool-call,
// and Gaussian point rewards, plus group-relative advantage normalization.

#include <string>
#include <vector>

#include "uiground/backend.hpp"
#include "uiground/geometry.hpp"

namespace uiground {

enum class FormatProfile {
    tool_call_only,      // exactly one well-formed yes/no tool_call span
    tool_call_and_point, // additionally requires an "(x, y)" pattern in the text
};

struct RewardConfig {
    double alpha = 0.5;          // sigma = alpha * gt edge length
    double sigma_floor_px = 1.0; // keeps zero-extent gt boxes well-defined
    double beta_kl = 0.04;       // recorded for experiment provenance; unused here
    FormatProfile format_profile = FormatProfile::tool_call_only;

    void validate() const;
};

// One policy response scored against the ground truth.
struct Rollout {
    std::string raw_text;
    ToolCall tool_call = ToolCall::absent;  // parsed decision
    PixelPoint point;                       // predicted point, full-image coords
    PixelBox gt_bbox;
    bool format_ok = false;  // derived from raw_text

    // Parses the tool call and format validity out of raw_text.
    static Rollout from_text(std::string raw_text, PixelPoint point, PixelBox gt_bbox,
                             const RewardConfig& cfg = {});
};

// exp(-1/2 [dx^2/sx^2 + dy^2/sy^2]) against the gt box center, with
// sx = max(alpha * width, floor) and sy likewise. Always in (0, 1].
double point_reward(const Rollout& r, const RewardConfig& cfg);

// 1 iff (no and point inside gt) or (yes and point outside gt). An absent
// tool call scores 0; rollouts routinely contain malformed output and the
// reward must stay total.
double tool_reward(const Rollout& r);

// 1 iff raw_text holds exactly one well-formed yes/no tool_call span and the
// configured answer structure validates.
double format_reward(const Rollout& r, const RewardConfig& cfg = {});

// format + tool + point, in [0, 3].
double total_reward(const Rollout& r, const RewardConfig& cfg);

// Group-relative normalization: (r_i - mean) / (pop_std + 1e-6).
// Requires at least two rewards.
std::vector<double> group_advantages(const std::vector<double>& rewards);

}  // namespace uiground
