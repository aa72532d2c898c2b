#include "uiground/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uiground/util/rng.hpp"

namespace uiground {

const char* to_string(ToolPolicy p) {
    switch (p) {
        case ToolPolicy::oracle: return "oracle";
        case ToolPolicy::always_yes: return "always_yes";
        case ToolPolicy::always_no: return "always_no";
        case ToolPolicy::bernoulli: return "bernoulli";
    }
    return "oracle";
}

void SyntheticModelSpec::validate() const {
    require_valid(gt_bbox, "SyntheticModelSpec.gt_bbox");
    if (noise_frac.empty()) throw ValidationError("SyntheticModelSpec: noise_frac must not be empty");
    for (double n : noise_frac)
        if (!(n >= 0.0) || !std::isfinite(n))
            throw ValidationError("SyntheticModelSpec: noise_frac entries must be >= 0");
    if (!(blob_sigma_px > 0.0)) throw ValidationError("SyntheticModelSpec: blob_sigma_px must be > 0");
    if (tool_policy == ToolPolicy::bernoulli && !(bernoulli_p >= 0.0 && bernoulli_p <= 1.0))
        throw ValidationError("SyntheticModelSpec: bernoulli_p must be in [0, 1]");
    if (patch_px < 1) throw ValidationError("SyntheticModelSpec: patch_px must be >= 1");
}

double SyntheticModelSpec::noise_for_stage(int stage) const {
    std::size_t idx = static_cast<std::size_t>(std::max(stage, 1)) - 1;
    return noise_frac[std::min(idx, noise_frac.size() - 1)];
}

ModelResponse synthetic_respond(const SyntheticModelSpec& spec, const ImageRef& image,
                                const PixelBox& region, int stage) {
    spec.validate();
    require_valid(region, "synthetic_respond.region");
    if (stage < 1) throw ValidationError("synthetic_respond: stage must be >= 1");
    if (region.x2 <= 0.0 || region.y2 <= 0.0 || region.x1 >= image.width || region.y1 >= image.height)
        throw ValidationError("synthetic_respond: region outside image");
    double rw = region.width(), rh = region.height();
    if (!(rw > 0.0 && rh > 0.0))
        throw ValidationError("synthetic_respond: region has zero extent");

    PatchGrid grid = PatchGrid::cover(rw, rh, spec.patch_px);

    std::uint64_t s = spec.seed;
    s = mix64(s, bits_of(region.x1));
    s = mix64(s, bits_of(region.y1));
    s = mix64(s, bits_of(region.x2));
    s = mix64(s, bits_of(region.y2));
    s = mix64(s, static_cast<std::uint64_t>(stage));
    Rng rng(s);

    double nf = spec.noise_for_stage(stage);
    double diag = std::hypot(rw, rh);
    double dx = nf * diag * rng.normal();
    double dy = nf * diag * rng.normal();

    // Blob center in the region-local frame.
    PixelPoint gt_center = spec.gt_bbox.center();
    double bx = gt_center.x + dx - region.x1;
    double by = gt_center.y + dy - region.y1;

    // Log-weights relative to their maximum: scale-invariant downstream, and
    // a far-off blob center cannot underflow the whole map to zero.
    std::vector<double> logw(static_cast<std::size_t>(grid.patch_count()));
    double max_logw = -std::numeric_limits<double>::infinity();
    double inv2s2 = 1.0 / (2.0 * spec.blob_sigma_px * spec.blob_sigma_px);
    for (int i = 0; i < grid.rows; ++i)
        for (int j = 0; j < grid.cols; ++j) {
            PixelPoint c = patch_center(grid, i, j);
            double d2 = (c.x - bx) * (c.x - bx) + (c.y - by) * (c.y - by);
            double lw = -d2 * inv2s2;
            logw[static_cast<std::size_t>(i) * grid.cols + j] = lw;
            max_logw = std::max(max_logw, lw);
        }
    std::vector<double> w(logw.size());
    for (std::size_t n = 0; n < w.size(); ++n) w[n] = std::exp(logw[n] - max_logw);

    AttentionMap attention(grid, std::move(w));

    ToolCall tool = ToolCall::no;
    switch (spec.tool_policy) {
        case ToolPolicy::always_yes:
            tool = ToolCall::yes;
            break;
        case ToolPolicy::always_no:
            tool = ToolCall::no;
            break;
        case ToolPolicy::bernoulli:
            tool = rng.uniform() < spec.bernoulli_p ? ToolCall::yes : ToolCall::no;
            break;
        case ToolPolicy::oracle: {
            PixelPoint local = argmax_point(attention);
            PixelPoint global{region.x1 + local.x, region.y1 + local.y};
            tool = point_in_box(global, spec.gt_bbox) ? ToolCall::no : ToolCall::yes;
            break;
        }
    }

    ModelResponse resp{std::move(attention), tool,
                       std::string("<tool_call>") + to_string(tool) + "</tool_call>"};
    return resp;
}

}  // namespace uiground
