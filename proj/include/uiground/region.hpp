#pragma once

// Attention-driven crop proposal: threshold the map, split the surviving
// patches into connected components, keep the top-k by score, and box their
// weighted centers.

#include <utility>
#include <vector>

#include "uiground/attention.hpp"
#include "uiground/geometry.hpp"

namespace uiground {

using PatchCell = std::pair<int, int>;  // (row, col)

struct ArpConfig {
    double tau = 0.3;          // threshold as a fraction of the map maximum
    int k = 20;                // components kept, by descending score
    int connectivity = 8;      // 4 or 8 neighborhood
    double min_crop_px = 448;  // minimum crop edge, enforced by symmetric growth
    double pad_px = 28;        // symmetric padding around the center bbox

    void validate() const;

    bool operator==(const ArpConfig&) const = default;
};

struct Component {
    std::vector<PatchCell> patches;  // sorted row-major
    double score = 0.0;              // sum of member attention weights
    PixelPoint center;               // attention-weighted centroid, pixel coords
};

// Patches with weight >= tau * max(A), sorted row-major. Never empty: the
// argmax always qualifies.
std::vector<PatchCell> threshold_set(const AttentionMap& a, double tau);

// Partition of `cells` into maximal connected groups. Components are ordered
// by their smallest member (row-major) and each member list is sorted.
std::vector<std::vector<PatchCell>> connected_components(const std::vector<PatchCell>& cells,
                                                         int connectivity);

// Attention-weighted centroid of the given patches, summed in the given order.
PixelPoint weighted_center(const AttentionMap& a, const std::vector<PatchCell>& cells);

// Threshold + split + score + center, before top-k selection. Order matches
// connected_components.
std::vector<Component> arp_components(const AttentionMap& a, const ArpConfig& cfg);

// Full crop proposal: bbox of the top-k component centers, padded, grown to
// the minimum edge length about its center, clamped to the image.
PixelBox arp_crop(const AttentionMap& a, const ArpConfig& cfg);

}  // namespace uiground
