#pragma once

// Coordinate geometry shared by all modules: pixel points and boxes, the
// patch grid induced by the vision encoder, and crop-frame remapping.
// Coordinates are real-valued throughout; rounding to integers happens only
// at external interfaces.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uiground/error.hpp"

namespace uiground {

struct PixelPoint {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const PixelPoint&) const = default;
};

struct PixelBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    bool operator==(const PixelBox&) const = default;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    PixelPoint center() const { return {(x1 + x2) * 0.5, (y1 + y2) * 0.5}; }
    bool valid() const {
        return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
               std::isfinite(y2) && x1 <= x2 && y1 <= y2;
    }

    PixelBox translated(double dx, double dy) const {
        return {x1 + dx, y1 + dy, x2 + dx, y2 + dy};
    }
};

inline void require_valid(const PixelBox& b, const char* what) {
    if (!b.valid())
        throw ValidationError(std::string(what) + ": invalid box (" +
                              std::to_string(b.x1) + "," + std::to_string(b.y1) + "," +
                              std::to_string(b.x2) + "," + std::to_string(b.y2) + ")");
}

// H x W tiling of an image by square patches. The grid may overhang the
// right/bottom edge (padded ViT grids), but never by a full patch row/column.
struct PatchGrid {
    int rows = 1;
    int cols = 1;
    int patch_px = 1;
    double image_w = 1.0;
    double image_h = 1.0;

    PatchGrid(int rows_, int cols_, int patch_px_, double image_w_, double image_h_)
        : rows(rows_), cols(cols_), patch_px(patch_px_), image_w(image_w_), image_h(image_h_) {
        if (rows < 1 || cols < 1 || patch_px < 1)
            throw ValidationError("PatchGrid: rows, cols, patch_px must be >= 1");
        if (!(image_w > 0.0) || !(image_h > 0.0) || !std::isfinite(image_w) || !std::isfinite(image_h))
            throw ValidationError("PatchGrid: image dimensions must be positive and finite");
        if (static_cast<double>(rows) * patch_px < image_h ||
            static_cast<double>(rows - 1) * patch_px >= image_h)
            throw ValidationError("PatchGrid: row count does not cover image height");
        if (static_cast<double>(cols) * patch_px < image_w ||
            static_cast<double>(cols - 1) * patch_px >= image_w)
            throw ValidationError("PatchGrid: column count does not cover image width");
    }

    // Smallest grid of patch_px patches covering a w x h image.
    static PatchGrid cover(double image_w, double image_h, int patch_px) {
        if (!(image_w > 0.0) || !(image_h > 0.0))
            throw ValidationError("PatchGrid::cover: image dimensions must be positive");
        if (patch_px < 1) throw ValidationError("PatchGrid::cover: patch_px must be >= 1");
        int rows = std::max(1, static_cast<int>(std::ceil(image_h / patch_px)));
        int cols = std::max(1, static_cast<int>(std::ceil(image_w / patch_px)));
        return PatchGrid(rows, cols, patch_px, image_w, image_h);
    }

    int patch_count() const { return rows * cols; }

    bool operator==(const PatchGrid&) const = default;
};

// Center of patch (i, j) in pixel coordinates, clamped into the image so that
// overhanging edge patches still map to valid pixels.
inline PixelPoint patch_center(const PatchGrid& g, int i, int j) {
    if (i < 0 || i >= g.rows || j < 0 || j >= g.cols)
        throw ValidationError("patch_center: index (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside grid " +
                              std::to_string(g.rows) + "x" + std::to_string(g.cols));
    double cx = (j + 0.5) * g.patch_px;
    double cy = (i + 0.5) * g.patch_px;
    return {std::clamp(cx, 0.0, std::max(0.0, g.image_w - 1.0)),
            std::clamp(cy, 0.0, std::max(0.0, g.image_h - 1.0))};
}

// Boundary-inclusive: a click on the border of an element still hits it.
inline bool point_in_box(const PixelPoint& p, const PixelBox& b) {
    return p.x >= b.x1 && p.x <= b.x2 && p.y >= b.y1 && p.y <= b.y2;
}

// Crop-local point -> full-image coordinates. The point must lie within the
// crop extents; anything else signals a backend/crop mismatch.
inline PixelPoint local_to_global(const PixelBox& crop, const PixelPoint& local) {
    if (!(local.x >= 0.0 && local.y >= 0.0 && local.x <= crop.width() && local.y <= crop.height()))
        throw ValidationError("local_to_global: point (" + std::to_string(local.x) + "," +
                              std::to_string(local.y) + ") outside crop extents " +
                              std::to_string(crop.width()) + "x" + std::to_string(crop.height()));
    return {crop.x1 + local.x, crop.y1 + local.y};
}

inline PixelPoint global_to_local(const PixelBox& crop, const PixelPoint& global) {
    if (!point_in_box(global, crop))
        throw ValidationError("global_to_local: point outside crop");
    return {global.x - crop.x1, global.y - crop.y1};
}

inline PixelBox clamp_box(const PixelBox& b, double image_w, double image_h) {
    return {std::clamp(b.x1, 0.0, image_w), std::clamp(b.y1, 0.0, image_h),
            std::clamp(b.x2, 0.0, image_w), std::clamp(b.y2, 0.0, image_h)};
}

}  // namespace uiground
