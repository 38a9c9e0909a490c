// casefile - offline artifact analysis workbench

#include <casefile/media/image.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>

namespace casefile {

namespace {

constexpr std::uint32_t bi_rgb = 0;
constexpr std::uint32_t bi_rle8 = 1;
constexpr std::uint32_t bi_rle4 = 2;
constexpr std::uint32_t bi_bitfields = 3;
constexpr std::uint32_t bi_alphabitfields = 6;
constexpr std::uint64_t max_pixels = 1ull << 26;

struct Channel {
    std::uint32_t mask = 0;
    int shift = 0;
    int bits = 0;

    Channel(std::uint32_t m = 0) : mask(m) {
        if (m) {
            shift = std::countr_zero(m);
            bits = std::popcount(m);
        }
    }
    std::uint8_t extract(std::uint32_t v) const {
        if (!mask) return 0;
        std::uint64_t raw = (v & mask) >> shift;
        std::uint64_t max = (1ull << bits) - 1;
        return static_cast<std::uint8_t>((raw * 255 + max / 2) / max);
    }
};

struct DibLayout {
    BmpInfo info;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    bool top_down = false;
    std::vector<Rgba> palette;
    std::array<Channel, 4> masks{}; // r g b a
    bool has_masks = false;
};

DibLayout read_dib_header(ByteView data, std::size_t header_offset, bool icon) {
    DibLayout l;
    auto& info = l.info;
    info.header_size = load_le32(data, header_offset);
    std::size_t palette_entry = 4;
    std::uint32_t colors_used = 0;
    if (info.header_size == 12) {
        info.width = load_le16(data, header_offset + 4);
        info.height = load_le16(data, header_offset + 6);
        info.bit_count = load_le16(data, header_offset + 10);
        palette_entry = 3;
    } else if (info.header_size >= 40 && info.header_size <= 124) {
        if (!in_bounds(data, header_offset, info.header_size)) {
            throw Error(Errc::out_of_bounds, "bitmap header is truncated");
        }
        info.width = static_cast<std::int32_t>(load_le32(data, header_offset + 4));
        info.height = static_cast<std::int32_t>(load_le32(data, header_offset + 8));
        info.bit_count = load_le16(data, header_offset + 14);
        info.compression = load_le32(data, header_offset + 16);
        colors_used = load_le32(data, header_offset + 32);
    } else {
        throw Error(Errc::bad_format, "unknown bitmap header size " + std::to_string(info.header_size));
    }

    if (info.compression == bi_rle8 || info.compression == bi_rle4) {
        throw Error(Errc::unsupported, "RLE-compressed bitmaps are not supported");
    }
    if (info.compression != bi_rgb && info.compression != bi_bitfields && info.compression != bi_alphabitfields) {
        throw Error(Errc::unsupported, "bitmap compression " + std::to_string(info.compression) + " is not supported");
    }
    switch (info.bit_count) {
    case 1: case 4: case 8: case 16: case 24: case 32: break;
    default: throw Error(Errc::unsupported, "unsupported bit depth " + std::to_string(info.bit_count));
    }
    if (info.compression != bi_rgb && info.bit_count != 16 && info.bit_count != 32) {
        throw Error(Errc::bad_format, "bit-field masks require a 16 or 32-bit bitmap");
    }

    std::int64_t h = info.height;
    if (icon) {
        if (h <= 0) throw Error(Errc::bad_format, "icon bitmap height must be positive");
        h /= 2;
    }
    l.top_down = h < 0;
    if (info.width <= 0 || h == 0) throw Error(Errc::bad_format, "bitmap has zero or negative width/height");
    l.width = static_cast<std::uint32_t>(info.width);
    l.height = static_cast<std::uint32_t>(std::llabs(h));
    if (std::uint64_t{l.width} * l.height > max_pixels) throw Error(Errc::unsupported, "bitmap dimensions too large");

    std::size_t after_header = header_offset + info.header_size;
    if (info.compression == bi_bitfields || info.compression == bi_alphabitfields) {
        l.has_masks = true;
        const int n = info.compression == bi_alphabitfields ? 4 : 3;
        std::size_t base = header_offset + 40;
        if (info.header_size == 40) after_header += static_cast<std::size_t>(n) * 4;
        for (int i = 0; i < n; ++i) l.masks[static_cast<std::size_t>(i)] = Channel(load_le32(data, base + 4 * static_cast<std::size_t>(i)));
        if (info.header_size >= 56) l.masks[3] = Channel(load_le32(data, header_offset + 52));
    } else if (info.bit_count == 16) {
        l.has_masks = true;
        l.masks = {Channel(0x7C00), Channel(0x03E0), Channel(0x001F), Channel(0)};
    }

    if (info.bit_count <= 8) {
        std::size_t count = colors_used ? colors_used : (1u << info.bit_count);
        count = std::min<std::size_t>(count, 256);
        l.palette.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t at = after_header + i * palette_entry;
            if (!in_bounds(data, at, palette_entry)) throw Error(Errc::out_of_bounds, "bitmap palette is truncated");
            l.palette.push_back({data[at + 2], data[at + 1], data[at], 255});
        }
        after_header += count * palette_entry;
    }
    info.pixel_offset = static_cast<std::uint32_t>(after_header);
    return l;
}

std::size_t row_stride(std::uint32_t width, std::uint32_t bpp) {
    return ((std::uint64_t{width} * bpp + 31) / 32) * 4;
}

ImageModel decode_pixels(ByteView data, const DibLayout& l, std::size_t pixel_offset, bool alpha_byte) {
    const auto bpp = l.info.bit_count;
    const std::size_t stride = row_stride(l.width, bpp);
    if (!in_bounds(data, pixel_offset, stride * l.height)) {
        throw Error(Errc::out_of_bounds, "bitmap pixel data is truncated");
    }
    ImageModel img;
    img.width = l.width;
    img.height = l.height;
    img.pixels.resize(std::size_t{l.width} * l.height);
    for (std::uint32_t row = 0; row < l.height; ++row) {
        const std::uint32_t y = l.top_down ? row : l.height - 1 - row;
        const std::uint8_t* p = data.data() + pixel_offset + row * stride;
        for (std::uint32_t x = 0; x < l.width; ++x) {
            Rgba px;
            if (bpp <= 8) {
                const std::uint32_t bit = x * bpp;
                const std::uint8_t byte = p[bit / 8];
                const int shift = 8 - bpp - static_cast<int>(bit % 8);
                const std::uint32_t index = (byte >> shift) & ((1u << bpp) - 1);
                px = index < l.palette.size() ? l.palette[index] : Rgba{0, 0, 0, 255};
            } else if (bpp == 24) {
                px = {p[x * 3 + 2], p[x * 3 + 1], p[x * 3], 255};
            } else {
                std::uint32_t v = bpp == 16 ? static_cast<std::uint32_t>(p[x * 2] | (p[x * 2 + 1] << 8))
                                            : static_cast<std::uint32_t>(p[x * 4] | (p[x * 4 + 1] << 8) |
                                                                         (p[x * 4 + 2] << 16) | (p[x * 4 + 3] << 24));
                if (l.has_masks) {
                    px = {l.masks[0].extract(v), l.masks[1].extract(v), l.masks[2].extract(v),
                          l.masks[3].mask ? l.masks[3].extract(v) : std::uint8_t{255}};
                } else {
                    px = {p[x * 4 + 2], p[x * 4 + 1], p[x * 4], alpha_byte ? p[x * 4 + 3] : std::uint8_t{255}};
                }
            }
            img.pixels[std::size_t{y} * l.width + x] = px;
        }
    }
    return img;
}

} // namespace

BmpInfo read_bmp_info(ByteView data) {
    if (!starts_with(data, {'B', 'M'})) throw Error(Errc::bad_format, "missing BM signature");
    if (data.size() < 18) throw Error(Errc::bad_format, "bitmap header is truncated");
    auto l = read_dib_header(data, 14, false);
    l.info.pixel_offset = load_le32(data, 10);
    return l.info;
}

ImageModel parse_bmp(ByteView data) {
    if (!starts_with(data, {'B', 'M'})) throw Error(Errc::bad_format, "missing BM signature");
    if (data.size() < 18) throw Error(Errc::bad_format, "bitmap header is truncated");
    auto layout = read_dib_header(data, 14, false);
    std::size_t pixel_offset = load_le32(data, 10);
    if (pixel_offset < 14 + layout.info.header_size || pixel_offset >= data.size()) {
        throw Error(Errc::bad_format, "bitmap pixel offset " + std::to_string(pixel_offset) + " is incoherent");
    }
    return decode_pixels(data, layout, pixel_offset, false);
}

ImageModel decode_icon_dib(ByteView data) {
    auto layout = read_dib_header(data, 0, true);
    const std::size_t xor_offset = layout.info.pixel_offset;
    auto img = decode_pixels(data, layout, xor_offset, layout.info.bit_count == 32);

    bool alpha_used = false;
    if (layout.info.bit_count == 32) {
        alpha_used = std::any_of(img.pixels.begin(), img.pixels.end(), [](const Rgba& p) { return p.a != 0; });
        if (!alpha_used) {
            for (auto& p : img.pixels) p.a = 255;
        }
    }
    const std::size_t and_offset = xor_offset + row_stride(layout.width, layout.info.bit_count) * layout.height;
    const std::size_t and_stride = row_stride(layout.width, 1);
    if (!alpha_used && in_bounds(data, and_offset, and_stride * layout.height)) {
        for (std::uint32_t row = 0; row < layout.height; ++row) {
            const std::uint32_t y = layout.height - 1 - row;
            const std::uint8_t* p = data.data() + and_offset + row * and_stride;
            for (std::uint32_t x = 0; x < layout.width; ++x) {
                if ((p[x / 8] >> (7 - x % 8)) & 1) img.pixels[std::size_t{y} * layout.width + x].a = 0;
            }
        }
    }
    return img;
}

PngHeader read_png_header(ByteView data) {
    if (!is_png(data)) throw Error(Errc::bad_format, "missing PNG signature");
    if (data.size() < 24 || load_be32(data, 12) != 0x49484452u) {
        throw Error(Errc::bad_format, "PNG stream does not start with IHDR");
    }
    return {load_be32(data, 16), load_be32(data, 20)};
}

IconImage decode_icon_payload(ByteView payload, ByteRange location) {
    IconImage icon;
    icon.data = location;
    if (is_png(payload)) {
        auto h = read_png_header(payload);
        icon.png = true;
        icon.width = h.width;
        icon.height = h.height;
        icon.bit_count = payload.size() > 24 ? payload[24] : 0;
        return icon;
    }
    auto header = read_dib_header(payload, 0, true);
    icon.image = decode_icon_dib(payload);
    icon.width = icon.image->width;
    icon.height = icon.image->height;
    icon.bit_count = header.info.bit_count;
    return icon;
}

std::vector<IconImage> parse_ico(ByteView data) {
    if (data.size() < 6) throw Error(Errc::bad_format, "icon header is truncated");
    if (load_le16(data, 0) != 0) throw Error(Errc::bad_format, "icon reserved field must be zero");
    auto type = load_le16(data, 2);
    if (type != 1 && type != 2) throw Error(Errc::bad_format, "icon type must be 1 (icon) or 2 (cursor)");
    const std::size_t count = load_le16(data, 4);
    std::vector<IconImage> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t entry = 6 + i * 16;
        if (!in_bounds(data, entry, 16)) throw Error(Errc::out_of_bounds, "icon directory is truncated");
        const std::uint32_t size = load_le32(data, entry + 8);
        const std::uint32_t offset = load_le32(data, entry + 12);
        ByteRange where{offset, size};
        if (!where.within(data.size())) {
            throw Error(Errc::out_of_bounds, "icon entry " + std::to_string(i) + " data range is out of bounds");
        }
        out.push_back(decode_icon_payload(slice(data, where), where));
    }
    return out;
}

} // namespace casefile
