// casefile - offline artifact analysis workbench
// BMP / ICO decoding to RGBA pixel models

#pragma once

#include <casefile/core/bytes.hpp>

#include <optional>
#include <vector>

namespace casefile {

struct Rgba {
    std::uint8_t r = 0, g = 0, b = 0, a = 255;
    friend bool operator==(const Rgba&, const Rgba&) = default;
};

struct ImageModel {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<Rgba> pixels; ///< row-major, top row first

    const Rgba& at(std::uint32_t x, std::uint32_t y) const { return pixels.at(std::size_t{y} * width + x); }
};

struct BmpInfo {
    std::uint32_t header_size = 0;
    std::int32_t width = 0;
    std::int32_t height = 0; ///< negative means top-down rows
    std::uint16_t bit_count = 0;
    std::uint32_t compression = 0;
    std::uint32_t pixel_offset = 0;
};

/// Uncompressed 1/4/8/16/24/32-bit DIBs (plus BI_BITFIELDS for 16/32 bit).
ImageModel parse_bmp(ByteView data);
BmpInfo read_bmp_info(ByteView data);

/// A DIB as stored in icon resources: doubled height, XOR bitmap then AND mask.
ImageModel decode_icon_dib(ByteView data);

struct PngHeader {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
};

inline bool is_png(ByteView data) noexcept {
    return starts_with(data, {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A});
}

/// Dimensions from the IHDR chunk.
PngHeader read_png_header(ByteView data);

struct IconImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint16_t bit_count = 0;
    bool png = false;               ///< passed through undecoded
    std::optional<ImageModel> image; ///< set for DIB payloads
    ByteRange data;                  ///< payload location in the container
};

/// Icon/cursor container: reserved 0, type 1 (icon) or 2 (cursor).
std::vector<IconImage> parse_ico(ByteView data);

/// Decodes one icon payload (DIB or PNG passthrough).
IconImage decode_icon_payload(ByteView payload, ByteRange location);

} // namespace casefile
