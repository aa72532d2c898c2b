#include <doctest.h>

#include <algorithm>

#include "support/arp_reference.hpp"
#include "support/testutil.hpp"
#include "uiground/region.hpp"

using namespace uiground;

namespace {

AttentionMap map6(std::vector<std::pair<PatchCell, double>> entries) {
    std::vector<double> w(36, 0.0);
    for (auto& [cell, v] : entries) w[static_cast<std::size_t>(cell.first) * 6 + cell.second] = v;
    return AttentionMap(PatchGrid(6, 6, 28, 168, 168), std::move(w));
}

}  // namespace

TEST_CASE("threshold_set: boundary inclusive") {
    // max 0.8, tau 0.3 -> cut 0.24; a weight of exactly 0.24 stays in.
    std::vector<double> w(36, 0.0);
    w[0] = 0.8;
    w[7] = 0.24;
    w[8] = 0.239;
    auto a = AttentionMap(PatchGrid(6, 6, 28, 168, 168), w);
    auto cells = threshold_set(a, 0.3);
    CHECK(cells == std::vector<PatchCell>{{0, 0}, {1, 1}});
}

TEST_CASE("threshold_set: one-hot and uniform") {
    std::vector<double> onehot(36, 0.0);
    onehot[14] = 2.0;
    auto a = AttentionMap(PatchGrid(6, 6, 28, 168, 168), onehot);
    CHECK(threshold_set(a, 0.9) == std::vector<PatchCell>{{2, 2}});
    CHECK(threshold_set(a, 0.0001) == std::vector<PatchCell>{{2, 2}});

    std::vector<double> uniform(36, 0.7);
    auto u = AttentionMap(PatchGrid(6, 6, 28, 168, 168), uniform);
    CHECK(threshold_set(u, 1.0).size() == 36);
}

TEST_CASE("connected_components: definitional cases") {
    auto two = connected_components({{0, 0}, {0, 1}, {3, 3}}, 4);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == std::vector<PatchCell>{{0, 0}, {0, 1}});
    CHECK(two[1] == std::vector<PatchCell>{{3, 3}});

    CHECK(connected_components({{0, 0}, {1, 1}}, 4).size() == 2);
    CHECK(connected_components({{0, 0}, {1, 1}}, 8).size() == 1);
}

TEST_CASE("connected_components: matches flood-fill oracle on random masks") {
    Rng rng(202);
    for (int t = 0; t < 500; ++t) {
        int rows = rng.uniform_int(1, 64), cols = rng.uniform_int(1, 64);
        double density = rng.uniform();
        std::vector<PatchCell> cells;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                if (rng.uniform() < density) cells.emplace_back(i, j);
        if (cells.empty()) cells.emplace_back(0, 0);
        int conn = t % 2 == 0 ? 4 : 8;
        CHECK(connected_components(cells, conn) == reference::flood_fill_components(cells, conn));
    }
}

TEST_CASE("weighted_center: analytic cases") {
    auto a = map6({{{0, 0}, 1.0}, {{0, 1}, 3.0}});
    CHECK(weighted_center(a, {{0, 0}}) == PixelPoint{14, 14});
    CHECK(weighted_center(a, {{0, 0}, {0, 1}}) == PixelPoint{35, 14});

    auto eq = map6({{{0, 0}, 2.0}, {{2, 2}, 2.0}});
    CHECK(weighted_center(eq, {{0, 0}, {2, 2}}) == PixelPoint{42, 42});
}

TEST_CASE("arp_crop: one-hot map with min size on a large image") {
    std::vector<double> w(36 * 36, 0.0);
    w[18 * 36 + 18] = 1.0;  // center (518, 518) on a 1008x1008 image
    AttentionMap a(PatchGrid(36, 36, 28, 1008, 1008), std::move(w));
    ArpConfig cfg;
    cfg.min_crop_px = 200;
    cfg.pad_px = 0;
    PixelBox box = arp_crop(a, cfg);
    CHECK(box == PixelBox{418, 418, 618, 618});
    CHECK(box.width() == 200);
}

TEST_CASE("arp_crop: two blobs, k large spans both centers") {
    // blob A: (0,0)=2, (0,1)=2 -> center (28, 14); blob B: (5,4)=3, (5,5)=1
    // -> center (133, 154). Padded bbox clamps to (0,0,161,168).
    auto a = map6({{{0, 0}, 2.0}, {{0, 1}, 2.0}, {{5, 4}, 3.0}, {{5, 5}, 1.0}});
    ArpConfig cfg;
    cfg.tau = 0.3;
    cfg.k = 20;
    cfg.min_crop_px = 1;
    cfg.pad_px = 28;
    CHECK(arp_crop(a, cfg) == PixelBox{0, 0, 161, 168});
}

TEST_CASE("arp_crop: k = 1 keeps the high-score blob") {
    // scores 5.0 vs 3.0; the winner's centroid bbox is degenerate at (28,14).
    auto a = map6({{{0, 0}, 2.5}, {{0, 1}, 2.5}, {{5, 4}, 1.5}, {{5, 5}, 1.5}});
    ArpConfig cfg;
    cfg.tau = 0.3;
    cfg.k = 1;
    cfg.min_crop_px = 1;
    cfg.pad_px = 28;
    CHECK(arp_crop(a, cfg) == PixelBox{0, 0, 56, 42});
}

TEST_CASE("arp_crop: contains the top component center and stays in the image") {
    Rng rng(203);
    ArpConfig cfg;
    for (int t = 0; t < 200; ++t) {
        auto a = testutil::random_map(rng, 32, 32);
        cfg.connectivity = t % 2 == 0 ? 4 : 8;
        auto comps = arp_components(a, cfg);
        auto best = std::max_element(comps.begin(), comps.end(),
                                     [](const Component& l, const Component& r) {
                                         return l.score < r.score;
                                     });
        PixelBox box = arp_crop(a, cfg);
        CHECK(point_in_box(best->center, box));
        CHECK(box.x1 >= 0);
        CHECK(box.y1 >= 0);
        CHECK(box.x2 <= a.grid().image_w);
        CHECK(box.y2 <= a.grid().image_h);
        CHECK(box.width() > 0);
        CHECK(box.height() > 0);
    }
}

TEST_CASE("arp_crop: invariant under power-of-two weight scaling") {
    Rng rng(204);
    ArpConfig cfg;
    for (int t = 0; t < 100; ++t) {
        auto a = testutil::random_map(rng, 24, 24);
        std::vector<double> scaled = a.weights();
        for (double& v : scaled) v *= 4.0;  // exact in binary floating point
        AttentionMap b(a.grid(), std::move(scaled));
        CHECK(threshold_set(a, cfg.tau) == threshold_set(b, cfg.tau));
        CHECK(arp_crop(a, cfg) == arp_crop(b, cfg));
    }
}

TEST_CASE("arp_crop: approximately invariant under arbitrary positive scaling") {
    Rng rng(205);
    ArpConfig cfg;
    auto a = testutil::random_map(rng, 24, 24);
    std::vector<double> scaled = a.weights();
    for (double& v : scaled) v *= 2.5;
    AttentionMap b(a.grid(), std::move(scaled));
    PixelBox ba = arp_crop(a, cfg), bb = arp_crop(b, cfg);
    CHECK(ba.x1 == doctest::Approx(bb.x1).epsilon(1e-9));
    CHECK(ba.y1 == doctest::Approx(bb.y1).epsilon(1e-9));
    CHECK(ba.x2 == doctest::Approx(bb.x2).epsilon(1e-9));
    CHECK(ba.y2 == doctest::Approx(bb.y2).epsilon(1e-9));
}

TEST_CASE("arp_crop: mirror equivariance") {
    Rng rng(206);
    for (int t = 0; t < 100; ++t) {
        int rows = rng.uniform_int(2, 16), cols = rng.uniform_int(2, 16);
        double img_w = cols * 28.0, img_h = rows * 28.0;
        std::vector<double> w(static_cast<std::size_t>(rows) * cols);
        for (auto& v : w) v = rng.uniform() + 1e-6;  // distinct weights, no tie-breaks
        AttentionMap a(PatchGrid(rows, cols, 28, img_w, img_h), w);
        std::vector<double> m(w.size());
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m[static_cast<std::size_t>(i) * cols + (cols - 1 - j)] =
                    w[static_cast<std::size_t>(i) * cols + j];
        AttentionMap am(PatchGrid(rows, cols, 28, img_w, img_h), std::move(m));
        ArpConfig cfg;
        cfg.min_crop_px = 1;
        PixelBox box = arp_crop(a, cfg);
        PixelBox mbox = arp_crop(am, cfg);
        CHECK(mbox.x1 == doctest::Approx(img_w - box.x2).epsilon(1e-9));
        CHECK(mbox.x2 == doctest::Approx(img_w - box.x1).epsilon(1e-9));
        CHECK(mbox.y1 == doctest::Approx(box.y1).epsilon(1e-9));
        CHECK(mbox.y2 == doctest::Approx(box.y2).epsilon(1e-9));
    }
}

TEST_CASE("center bbox grows monotonically with k") {
    Rng rng(207);
    for (int t = 0; t < 100; ++t) {
        auto a = testutil::random_map(rng, 24, 24);
        ArpConfig cfg;
        auto comps = arp_components(a, cfg);
        std::stable_sort(comps.begin(), comps.end(),
                         [](const Component& l, const Component& r) { return l.score > r.score; });
        auto bbox_of = [&](std::size_t k) {
            std::size_t keep = std::min(k, comps.size());
            PixelBox b{comps[0].center.x, comps[0].center.y, comps[0].center.x,
                       comps[0].center.y};
            for (std::size_t n = 1; n < keep; ++n) {
                b.x1 = std::min(b.x1, comps[n].center.x);
                b.x2 = std::max(b.x2, comps[n].center.x);
                b.y1 = std::min(b.y1, comps[n].center.y);
                b.y2 = std::max(b.y2, comps[n].center.y);
            }
            return b;
        };
        PixelBox small = bbox_of(3), large = bbox_of(10);
        CHECK(large.x1 <= small.x1);
        CHECK(large.y1 <= small.y1);
        CHECK(large.x2 >= small.x2);
        CHECK(large.y2 >= small.y2);
    }
}

TEST_CASE("arp_crop: matches the serial reference on random maps") {
    Rng rng(208);
    for (int t = 0; t < 300; ++t) {
        auto a = testutil::random_map(rng, 32, 32);
        ArpConfig cfg;
        cfg.tau = t % 3 == 0 ? 0.1 : (t % 3 == 1 ? 0.3 : 0.7);
        cfg.k = t % 2 == 0 ? 1 : 20;
        cfg.connectivity = t % 2 == 0 ? 4 : 8;
        CHECK(arp_crop(a, cfg) == reference::arp_crop(a, cfg));
    }
}

TEST_CASE("ArpConfig: validation") {
    ArpConfig cfg;
    cfg.tau = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.connectivity = 6;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.k = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
