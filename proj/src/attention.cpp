#include "uiground/attention.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace uiground {

AttentionMap::AttentionMap(PatchGrid grid, std::vector<double> weights)
    : grid_(grid), weights_(std::move(weights)) {
    if (weights_.size() != static_cast<std::size_t>(grid_.patch_count()))
        throw ValidationError("AttentionMap: expected " + std::to_string(grid_.patch_count()) +
                              " weights, got " + std::to_string(weights_.size()));
    bool any_positive = false;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0)
            throw ValidationError("AttentionMap: weights must be finite and non-negative");
        any_positive |= w > 0.0;
    }
    if (!any_positive) throw ValidationError("AttentionMap: all-zero map");
}

double AttentionMap::max_weight() const {
    double m = 0.0;
    for (double w : weights_) m = std::max(m, w);
    return m;
}

TargetDistribution::TargetDistribution(PatchGrid grid, std::vector<double> probs, double slack)
    : grid_(grid), probs_(std::move(probs)) {
    if (probs_.size() != static_cast<std::size_t>(grid_.patch_count()))
        throw ValidationError("TargetDistribution: size does not match grid");
    double sum = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0)
            throw ValidationError("TargetDistribution: entries must be finite and non-negative");
        sum += p;
    }
    double tol = std::max(slack, 1e-9);
    if (sum > 1.0 + 1e-9 || sum < 1.0 - tol)
        throw ValidationError("TargetDistribution: entries sum to " + std::to_string(sum) +
                              ", expected 1 within " + std::to_string(tol));
}

TargetDistribution normalize(const AttentionMap& a) {
    double sum = 0.0;
    for (double w : a.weights()) sum += w;
    if (!(sum > 0.0)) throw ValidationError("normalize: attention weights sum to zero");
    std::vector<double> probs(a.weights().size());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = a.weights()[i] / sum;
    return TargetDistribution(a.grid(), std::move(probs));
}

std::pair<int, int> argmax_patch(const AttentionMap& a) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.weights().size(); ++i)
        if (a.weights()[i] > a.weights()[best]) best = i;
    int cols = a.grid().cols;
    return {static_cast<int>(best) / cols, static_cast<int>(best) % cols};
}

PixelPoint argmax_point(const AttentionMap& a) {
    auto [i, j] = argmax_patch(a);
    return patch_center(a.grid(), i, j);
}

TargetDistribution build_target(const PixelBox& gt, const PatchGrid& grid, double eps) {
    require_valid(gt, "build_target");
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw ValidationError("build_target: eps must be non-negative and finite");
    if (gt.x2 < 0.0 || gt.y2 < 0.0 || gt.x1 > grid.image_w || gt.y1 > grid.image_h)
        throw ValidationError("build_target: gt box lies entirely outside the image");

    std::vector<double> y(static_cast<std::size_t>(grid.patch_count()), 0.0);
    double covered = 0.0;
    for (int i = 0; i < grid.rows; ++i)
        for (int j = 0; j < grid.cols; ++j)
            if (point_in_box(patch_center(grid, i, j), gt)) {
                y[static_cast<std::size_t>(i) * grid.cols + j] = 1.0;
                covered += 1.0;
            }

    if (covered == 0.0) {
        // Box smaller than a patch: fall back to the nearest patch center.
        PixelPoint c = gt.center();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (int i = 0; i < grid.rows; ++i)
            for (int j = 0; j < grid.cols; ++j) {
                PixelPoint pc = patch_center(grid, i, j);
                double d2 = (pc.x - c.x) * (pc.x - c.x) + (pc.y - c.y) * (pc.y - c.y);
                if (d2 < best) {
                    best = d2;
                    best_idx = static_cast<std::size_t>(i) * grid.cols + j;
                }
            }
        y[best_idx] = 1.0;
        covered = 1.0;
    }

    double denom = covered + eps;
    for (double& v : y) v /= denom;
    // Epsilon in the denominator leaves the sum short of 1 by eps/denom.
    return TargetDistribution(grid, std::move(y), eps);
}

double attention_kl(const TargetDistribution& p, const TargetDistribution& a) {
    if (!(p.grid() == a.grid()))
        throw ValidationError("attention_kl: distributions are over different grids");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.probs().size(); ++i) {
        double pi = p.probs()[i];
        if (pi <= 0.0) continue;  // 0 * log(0/a) -> 0 by the limit convention
        double ai = a.probs()[i];
        if (ai <= 0.0)
            throw ValidationError("attention_kl: p > 0 where a = 0 (infinite divergence)");
        kl += pi * std::log(pi / ai);
    }
    return kl;
}

}  // namespace uiground
