#pragma once

// Attention-map container plus the attention-supervision math: ground-truth
// target construction and KL divergence between patch distributions.

#include <utility>
#include <vector>

#include "uiground/geometry.hpp"

namespace uiground {

// Non-negative per-patch weights over a grid. At least one weight must be
// positive; an all-zero map carries no localization signal and is rejected.
class AttentionMap {
  public:
    AttentionMap(PatchGrid grid, std::vector<double> weights);

    const PatchGrid& grid() const { return grid_; }
    const std::vector<double>& weights() const { return weights_; }
    double at(int i, int j) const { return weights_[static_cast<std::size_t>(i) * grid_.cols + j]; }
    double max_weight() const;

    bool operator==(const AttentionMap&) const = default;

  private:
    PatchGrid grid_;
    std::vector<double> weights_;  // row-major, rows*cols entries
};

// Probability distribution over patches. Entries are >= 0 and sum to 1
// within `slack` (targets built with a denominator epsilon fall short of 1
// by up to that epsilon).
class TargetDistribution {
  public:
    TargetDistribution(PatchGrid grid, std::vector<double> probs, double slack = 1e-9);

    const PatchGrid& grid() const { return grid_; }
    const std::vector<double>& probs() const { return probs_; }
    double at(int i, int j) const { return probs_[static_cast<std::size_t>(i) * grid_.cols + j]; }

  private:
    PatchGrid grid_;
    std::vector<double> probs_;
};

// weights / sum(weights), as a proper distribution.
TargetDistribution normalize(const AttentionMap& a);

// Row-major index of the highest-weight patch; ties go to the smallest (i, j).
std::pair<int, int> argmax_patch(const AttentionMap& a);

// Center of the highest-weight patch in pixel coordinates.
PixelPoint argmax_point(const AttentionMap& a);

// Ground-truth target for attention supervision: y_i = 1 for every patch
// whose center lies inside gt (boundary-inclusive). If no center falls
// inside, the single patch whose center is nearest the bbox center gets 1.
// p_i = y_i / (sum_j y_j + eps).
TargetDistribution build_target(const PixelBox& gt, const PatchGrid& grid, double eps = 1e-8);

// KL(p || a) = sum over patches with p_i > 0 of p_i * log(p_i / a_i).
// Natural log. p_i > 0 where a_i == 0 is an error, not infinity.
double attention_kl(const TargetDistribution& p, const TargetDistribution& a);

}  // namespace uiground
