#include <doctest.h>

#include "uiground/geometry.hpp"
#include "uiground/util/rng.hpp"

using namespace uiground;

TEST_CASE("patch_center: half-patch offsets") {
    PatchGrid g(4, 4, 28, 112, 112);
    CHECK(patch_center(g, 0, 0) == PixelPoint{14, 14});
    CHECK(patch_center(g, 3, 3) == PixelPoint{98, 98});
    CHECK(patch_center(g, 1, 2) == PixelPoint{70, 42});
}

TEST_CASE("patch_center: clamps into the image when the grid overhangs") {
    // 2x2 grid of 28px patches covers 56px; raw center of (1,1) is (42,42).
    PatchGrid g(2, 2, 28, 40, 40);
    CHECK(patch_center(g, 1, 1) == PixelPoint{39, 39});
    // No clamp when the center is in bounds.
    PatchGrid g2(2, 2, 28, 50, 50);
    CHECK(patch_center(g2, 1, 1) == PixelPoint{42, 42});
}

TEST_CASE("patch_center: index out of range") {
    PatchGrid g(2, 2, 28, 56, 56);
    CHECK_THROWS_AS(patch_center(g, 2, 0), ValidationError);
    CHECK_THROWS_AS(patch_center(g, 0, -1), ValidationError);
}

TEST_CASE("patch_center: strictly increasing before clamping") {
    PatchGrid g(8, 8, 28, 224, 224);
    for (int i = 1; i < 8; ++i) {
        CHECK(patch_center(g, i, 0).y > patch_center(g, i - 1, 0).y);
        CHECK(patch_center(g, 0, i).x > patch_center(g, 0, i - 1).x);
    }
}

TEST_CASE("PatchGrid: cover invariants") {
    auto g = PatchGrid::cover(300, 250, 28);
    CHECK(g.rows == 9);
    CHECK(g.cols == 11);
    CHECK_THROWS_AS(PatchGrid(1, 1, 28, 100, 100), ValidationError);  // does not cover
    CHECK_THROWS_AS(PatchGrid(5, 4, 28, 112, 112), ValidationError);  // full overhang row
    CHECK_THROWS_AS(PatchGrid(0, 4, 28, 112, 112), ValidationError);
}

TEST_CASE("local_to_global: translation and identity") {
    CHECK(local_to_global({100, 50, 300, 250}, {10, 20}) == PixelPoint{110, 70});
    CHECK(local_to_global({0, 0, 640, 480}, {12.5, 7.25}) == PixelPoint{12.5, 7.25});
    CHECK_THROWS_AS(local_to_global({100, 50, 300, 250}, {201, 0}), ValidationError);
}

TEST_CASE("local/global round trip") {
    Rng rng(7);
    PixelBox crop{37.5, 12.0, 412.5, 301.0};
    for (int t = 0; t < 200; ++t) {
        PixelPoint p{rng.uniform_range(crop.x1, crop.x2), rng.uniform_range(crop.y1, crop.y2)};
        PixelPoint back = local_to_global(crop, global_to_local(crop, p));
        CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
    }
}

TEST_CASE("point_in_box: boundary inclusive") {
    PixelBox b{100, 100, 200, 150};
    CHECK(point_in_box({150, 125}, b));
    CHECK(point_in_box({200, 150}, b));
    CHECK(point_in_box({100, 100}, b));
    CHECK_FALSE(point_in_box({201, 125}, b));
    CHECK_FALSE(point_in_box({150, 99.999}, b));
}

TEST_CASE("point_in_box: invariant under joint translation") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        PixelBox b{rng.uniform_range(-50, 50), rng.uniform_range(-50, 50), 0, 0};
        b.x2 = b.x1 + rng.uniform_range(0, 100);
        b.y2 = b.y1 + rng.uniform_range(0, 100);
        PixelPoint p{rng.uniform_range(-100, 150), rng.uniform_range(-100, 150)};
        double dx = rng.uniform_range(-1000, 1000), dy = rng.uniform_range(-1000, 1000);
        CHECK(point_in_box(p, b) ==
              point_in_box({p.x + dx, p.y + dy}, b.translated(dx, dy)));
    }
}

TEST_CASE("clamp_box") {
    CHECK(clamp_box({-10, -10, 50, 50}, 100, 100) == PixelBox{0, 0, 50, 50});
    CHECK(clamp_box({0, 0, 150, 80}, 100, 100) == PixelBox{0, 0, 100, 80});
    CHECK(clamp_box({10, 20, 30, 40}, 100, 100) == PixelBox{10, 20, 30, 40});
    // Ordering is preserved even when the box lies fully outside.
    PixelBox out = clamp_box({-30, -30, -10, -10}, 100, 100);
    CHECK(out.x1 <= out.x2);
    CHECK(out.y1 <= out.y2);
}
