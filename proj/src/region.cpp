#include "uiground/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace uiground {

void ArpConfig::validate() const {
    if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("ArpConfig: tau must be in (0, 1]");
    if (k < 1) throw ValidationError("ArpConfig: k must be >= 1");
    if (connectivity != 4 && connectivity != 8)
        throw ValidationError("ArpConfig: connectivity must be 4 or 8");
    if (!(min_crop_px >= 1.0)) throw ValidationError("ArpConfig: min_crop_px must be >= 1");
    if (!(pad_px >= 0.0)) throw ValidationError("ArpConfig: pad_px must be >= 0");
}

std::vector<PatchCell> threshold_set(const AttentionMap& a, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("threshold_set: tau must be in (0, 1]");
    double cut = tau * a.max_weight();
    std::vector<PatchCell> cells;
    for (int i = 0; i < a.grid().rows; ++i)
        for (int j = 0; j < a.grid().cols; ++j)
            if (a.at(i, j) >= cut) cells.emplace_back(i, j);
    return cells;
}

namespace {

// Union-find over the cell list with path compression.
struct DisjointSet {
    std::vector<int> parent;

    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // Smaller index wins so roots stay the first member in row-major order.
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

}  // namespace

std::vector<std::vector<PatchCell>> connected_components(const std::vector<PatchCell>& cells,
                                                         int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw ValidationError("connected_components: connectivity must be 4 or 8");
    if (cells.empty()) throw ValidationError("connected_components: empty cell set");

    std::vector<PatchCell> sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::unordered_map<long long, int> index;
    index.reserve(sorted.size() * 2);
    auto key = [](int i, int j) {
        return (static_cast<long long>(i) << 32) ^ static_cast<unsigned int>(j);
    };
    for (std::size_t n = 0; n < sorted.size(); ++n)
        index[key(sorted[n].first, sorted[n].second)] = static_cast<int>(n);

    DisjointSet ds(sorted.size());
    for (std::size_t n = 0; n < sorted.size(); ++n) {
        auto [i, j] = sorted[n];
        // Only look at neighbors that precede (i, j) in row-major order; the
        // symmetric pairs come from the neighbors' own iterations.
        static const int off4[][2] = {{-1, 0}, {0, -1}};
        static const int off8[][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}};
        const auto* offs = connectivity == 4 ? off4 : off8;
        int count = connectivity == 4 ? 2 : 4;
        for (int t = 0; t < count; ++t) {
            auto it = index.find(key(i + offs[t][0], j + offs[t][1]));
            if (it != index.end()) ds.unite(static_cast<int>(n), it->second);
        }
    }

    // Group members under their root; roots appear in row-major order of the
    // component's smallest member, so a stable bucket walk gives the
    // deterministic output order.
    std::unordered_map<int, std::size_t> slot;
    std::vector<std::vector<PatchCell>> groups;
    for (std::size_t n = 0; n < sorted.size(); ++n) {
        int root = ds.find(static_cast<int>(n));
        auto it = slot.find(root);
        if (it == slot.end()) {
            slot.emplace(root, groups.size());
            groups.emplace_back();
            groups.back().push_back(sorted[n]);
        } else {
            groups[it->second].push_back(sorted[n]);
        }
    }
    return groups;  // members already sorted: they were appended in row-major order
}

PixelPoint weighted_center(const AttentionMap& a, const std::vector<PatchCell>& cells) {
    if (cells.empty()) throw ValidationError("weighted_center: empty patch set");
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& [i, j] : cells) {
        double w = a.at(i, j);
        PixelPoint c = patch_center(a.grid(), i, j);
        sw += w;
        sx += w * c.x;
        sy += w * c.y;
    }
    if (!(sw > 0.0)) throw ValidationError("weighted_center: zero total weight");
    return {sx / sw, sy / sw};
}

std::vector<Component> arp_components(const AttentionMap& a, const ArpConfig& cfg) {
    cfg.validate();
    auto cells = threshold_set(a, cfg.tau);
    auto groups = connected_components(cells, cfg.connectivity);
    std::vector<Component> comps;
    comps.reserve(groups.size());
    for (auto& g : groups) {
        Component c;
        c.score = 0.0;
        for (const auto& [i, j] : g) c.score += a.at(i, j);
        c.center = weighted_center(a, g);
        c.patches = std::move(g);
        comps.push_back(std::move(c));
    }
    return comps;
}

PixelBox arp_crop(const AttentionMap& a, const ArpConfig& cfg) {
    auto comps = arp_components(a, cfg);

    // Top-k by score; stable sort keeps the deterministic component order on ties.
    std::stable_sort(comps.begin(), comps.end(),
                     [](const Component& l, const Component& r) { return l.score > r.score; });
    std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(cfg.k), comps.size());

    double x1 = comps[0].center.x, x2 = comps[0].center.x;
    double y1 = comps[0].center.y, y2 = comps[0].center.y;
    for (std::size_t n = 1; n < keep; ++n) {
        x1 = std::min(x1, comps[n].center.x);
        x2 = std::max(x2, comps[n].center.x);
        y1 = std::min(y1, comps[n].center.y);
        y2 = std::max(y2, comps[n].center.y);
    }

    x1 -= cfg.pad_px;
    y1 -= cfg.pad_px;
    x2 += cfg.pad_px;
    y2 += cfg.pad_px;

    if (x2 - x1 < cfg.min_crop_px) {
        double cx = (x1 + x2) * 0.5;
        x1 = cx - cfg.min_crop_px * 0.5;
        x2 = cx + cfg.min_crop_px * 0.5;
    }
    if (y2 - y1 < cfg.min_crop_px) {
        double cy = (y1 + y2) * 0.5;
        y1 = cy - cfg.min_crop_px * 0.5;
        y2 = cy + cfg.min_crop_px * 0.5;
    }

    return clamp_box({x1, y1, x2, y2}, a.grid().image_w, a.grid().image_h);
}

}  // namespace uiground
