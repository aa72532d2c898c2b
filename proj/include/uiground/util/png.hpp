#pragma once

// Minimal PNG support for the HTTP backend and the stub server: dimension
// sniffing, encode/decode of 8-bit non-interlaced images, and rectangular
// cropping. Not a general codec; palette and 16-bit images are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include "uiground/error.hpp"

namespace uiground {

struct PngDims {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
};

// Reads the IHDR header only.
PngDims png_sniff_dims(const std::string& bytes);

struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    int channels = 0;                 // 1 = gray, 2 = gray+alpha, 3 = rgb, 4 = rgba
    std::vector<std::uint8_t> pixels; // row-major, width*height*channels
};

Image png_decode(const std::string& bytes);
std::string png_encode(const Image& image);

// Crops [x, x+w) x [y, y+h); the rectangle must lie inside the image.
Image crop_image(const Image& image, std::uint32_t x, std::uint32_t y, std::uint32_t w,
                 std::uint32_t h);

}  // namespace uiground
