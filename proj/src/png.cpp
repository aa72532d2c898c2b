#include "uiground/util/png.hpp"

#include <zlib.h>

#include <cstdlib>
#include <cstring>

namespace uiground {

namespace {

constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t read_u32(const unsigned char* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

void write_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string& out, const char type[4], const std::string& data) {
    write_u32(out, static_cast<std::uint32_t>(data.size()));
    std::size_t crc_start = out.size();
    out.append(type, 4);
    out.append(data);
    auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data() + crc_start),
                     static_cast<uInt>(out.size() - crc_start));
    write_u32(out, static_cast<std::uint32_t>(crc));
}

int channels_for_color_type(int color_type) {
    switch (color_type) {
        case 0: return 1;  // gray
        case 2: return 3;  // rgb
        case 4: return 2;  // gray+alpha
        case 6: return 4;  // rgba
        default: return 0; // palette (3) and anything else unsupported
    }
}

int color_type_for_channels(int channels) {
    switch (channels) {
        case 1: return 0;
        case 2: return 4;
        case 3: return 2;
        case 4: return 6;
        default: return -1;
    }
}

std::uint8_t paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

std::string zlib_inflate(const std::string& in, std::size_t expected) {
    std::string out(expected, '\0');
    uLongf len = static_cast<uLongf>(expected);
    int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &len,
                        reinterpret_cast<const Bytef*>(in.data()), static_cast<uLong>(in.size()));
    if (rc != Z_OK || len != expected) throw ValidationError("png_decode: bad image data stream");
    return out;
}

std::string zlib_deflate(const std::string& in) {
    uLongf bound = compressBound(static_cast<uLong>(in.size()));
    std::string out(bound, '\0');
    int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                       reinterpret_cast<const Bytef*>(in.data()), static_cast<uLong>(in.size()), 6);
    if (rc != Z_OK) throw Error("png_encode: deflate failed");
    out.resize(bound);
    return out;
}

}  // namespace

PngDims png_sniff_dims(const std::string& bytes) {
    if (bytes.size() < 33 || std::memcmp(bytes.data(), kSignature, 8) != 0)
        throw ValidationError("png_sniff_dims: not a PNG file");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (std::memcmp(p + 12, "IHDR", 4) != 0)
        throw ValidationError("png_sniff_dims: missing IHDR");
    PngDims d{read_u32(p + 16), read_u32(p + 20)};
    if (d.width == 0 || d.height == 0) throw ValidationError("png_sniff_dims: zero dimension");
    return d;
}

Image png_decode(const std::string& bytes) {
    PngDims dims = png_sniff_dims(bytes);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    int bit_depth = p[24];
    int color_type = p[25];
    int interlace = p[28];
    int channels = channels_for_color_type(color_type);
    if (bit_depth != 8 || channels == 0 || interlace != 0)
        throw ValidationError("png_decode: only 8-bit non-interlaced gray/rgb images supported");

    // Concatenate IDAT payloads.
    std::string idat;
    std::size_t pos = 8;
    while (pos + 12 <= bytes.size()) {
        std::uint32_t len = read_u32(p + pos);
        const char* type = bytes.data() + pos + 4;
        if (pos + 12 + len > bytes.size()) throw ValidationError("png_decode: truncated chunk");
        if (std::memcmp(type, "IDAT", 4) == 0) idat.append(bytes, pos + 8, len);
        if (std::memcmp(type, "IEND", 4) == 0) break;
        pos += 12 + len;
    }
    if (idat.empty()) throw ValidationError("png_decode: no image data");

    std::size_t stride = static_cast<std::size_t>(dims.width) * channels;
    std::string raw = zlib_inflate(idat, (stride + 1) * dims.height);

    Image img{dims.width, dims.height, channels, {}};
    img.pixels.resize(stride * dims.height);
    std::vector<std::uint8_t> prev(stride, 0);
    int bpp = channels;  // bytes per pixel at 8-bit depth
    for (std::uint32_t y = 0; y < dims.height; ++y) {
        const auto* row = reinterpret_cast<const std::uint8_t*>(raw.data()) + y * (stride + 1);
        std::uint8_t filter = row[0];
        std::uint8_t* cur = img.pixels.data() + y * stride;
        for (std::size_t x = 0; x < stride; ++x) {
            int a = x >= static_cast<std::size_t>(bpp) ? cur[x - bpp] : 0;
            int b = prev[x];
            int c = x >= static_cast<std::size_t>(bpp) ? prev[x - bpp] : 0;
            int v = row[1 + x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw ValidationError("png_decode: unknown filter type");
            }
            cur[x] = static_cast<std::uint8_t>(v & 0xff);
        }
        std::memcpy(prev.data(), cur, stride);
    }
    return img;
}

std::string png_encode(const Image& image) {
    int color_type = color_type_for_channels(image.channels);
    if (color_type < 0) throw ValidationError("png_encode: unsupported channel count");
    if (image.width == 0 || image.height == 0)
        throw ValidationError("png_encode: zero dimension");
    std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    if (image.pixels.size() != stride * image.height)
        throw ValidationError("png_encode: pixel buffer size mismatch");

    std::string ihdr;
    write_u32(ihdr, image.width);
    write_u32(ihdr, image.height);
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(static_cast<char>(color_type));
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace

    std::string raw;
    raw.reserve((stride + 1) * image.height);
    for (std::uint32_t y = 0; y < image.height; ++y) {
        raw.push_back(0);  // filter: none
        raw.append(reinterpret_cast<const char*>(image.pixels.data() + y * stride), stride);
    }

    std::string out(reinterpret_cast<const char*>(kSignature), 8);
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_deflate(raw));
    append_chunk(out, "IEND", "");
    return out;
}

Image crop_image(const Image& image, std::uint32_t x, std::uint32_t y, std::uint32_t w,
                 std::uint32_t h) {
    if (w == 0 || h == 0 || x + w > image.width || y + h > image.height)
        throw ValidationError("crop_image: rectangle outside image");
    Image out{w, h, image.channels, {}};
    std::size_t in_stride = static_cast<std::size_t>(image.width) * image.channels;
    std::size_t out_stride = static_cast<std::size_t>(w) * image.channels;
    out.pixels.resize(out_stride * h);
    for (std::uint32_t row = 0; row < h; ++row)
        std::memcpy(out.pixels.data() + row * out_stride,
                    image.pixels.data() + (y + row) * in_stride + static_cast<std::size_t>(x) * image.channels,
                    out_stride);
    return out;
}

}  // namespace uiground
