// casefile - offline artifact analysis workbench

#include <casefile/engine/content.hpp>

#include <casefile/core/unicode.hpp>

#include <algorithm>

namespace casefile {

const char* to_string(TextEncoding encoding) noexcept {
    switch (encoding) {
    case TextEncoding::ascii: return "ASCII";
    case TextEncoding::utf8: return "UTF-8";
    case TextEncoding::utf16le: return "UTF-16LE";
    case TextEncoding::utf16be: return "UTF-16BE";
    }
    return "?";
}

namespace {

bool printable_ascii(std::uint8_t b) noexcept {
    return (b >= 0x20 && b < 0x7F) || b == '\t' || b == '\n' || b == '\r' || b == '\f' ||
           b == '\v';
}

/// Length of a well-formed UTF-8 multibyte sequence at pos, or 0. A sequence
/// cut by the end of the probe window counts as well-formed.
std::size_t utf8_sequence(ByteView data, std::size_t pos, bool window_cut) {
    auto b0 = data[pos];
    std::size_t need = 0;
    if (b0 >= 0xC2 && b0 <= 0xDF) need = 1;
    else if (b0 >= 0xE0 && b0 <= 0xEF) need = 2;
    else if (b0 >= 0xF0 && b0 <= 0xF4) need = 3;
    else return 0;
    for (std::size_t k = 1; k <= need; ++k) {
        if (pos + k >= data.size()) return window_cut ? data.size() - pos : 0;
        if ((data[pos + k] & 0xC0) != 0x80) return 0;
    }
    return need + 1;
}

struct Utf16Score {
    std::size_t units = 0;
    std::size_t hits = 0;
};

Utf16Score utf16_pattern(ByteView prefix, bool little_endian) {
    Utf16Score s;
    for (std::size_t i = 0; i + 1 < prefix.size(); i += 2) {
        auto lo = little_endian ? prefix[i] : prefix[i + 1];
        auto hi = little_endian ? prefix[i + 1] : prefix[i];
        ++s.units;
        if (hi == 0 && printable_ascii(lo)) ++s.hits;
    }
    return s;
}

bool meets(std::size_t hits, std::size_t total) {
    return total > 0 && static_cast<double>(hits) >= text_printable_threshold * static_cast<double>(total);
}

} // namespace

ContentClass classify_content(ByteView data) {
    if (data.empty()) return {};
    if (starts_with(data, {0xEF, 0xBB, 0xBF})) return {ContentKind::text, TextEncoding::utf8, true};
    if (starts_with(data, {0xFF, 0xFE})) return {ContentKind::text, TextEncoding::utf16le, true};
    if (starts_with(data, {0xFE, 0xFF})) return {ContentKind::text, TextEncoding::utf16be, true};

    const bool cut = data.size() > text_probe_window;
    ByteView prefix = data.first(std::min(data.size(), text_probe_window));

    if (prefix.size() >= 2) {
        auto le = utf16_pattern(prefix, true);
        if (meets(le.hits, le.units)) return {ContentKind::text, TextEncoding::utf16le, false};
        auto be = utf16_pattern(prefix, false);
        if (meets(be.hits, be.units)) return {ContentKind::text, TextEncoding::utf16be, false};
    }

    std::size_t ascii = 0;
    std::size_t utf8 = 0;
    bool multibyte = false;
    for (std::size_t i = 0; i < prefix.size();) {
        if (printable_ascii(prefix[i])) {
            ++ascii;
            ++utf8;
            ++i;
            continue;
        }
        if (prefix[i] >= 0x80) {
            if (auto n = utf8_sequence(prefix, i, cut); n > 0) {
                utf8 += n;
                multibyte = true;
                i += n;
                continue;
            }
        }
        ++i;
    }
    if (multibyte && meets(utf8, prefix.size())) return {ContentKind::text, TextEncoding::utf8, false};
    if (meets(ascii, prefix.size())) return {ContentKind::text, TextEncoding::ascii, false};
    return {};
}

std::string CanonicalText::utf8() const { return to_utf8(code_points); }

namespace {

void push(CanonicalText& t, char32_t cp, std::size_t offset, bool replaced) {
    if (replaced) t.replacements.push_back(t.code_points.size());
    t.code_points.push_back(cp);
    t.offsets.push_back(offset);
}

void decode_utf8(CanonicalText& t, ByteView data, std::size_t start) {
    std::size_t i = start;
    while (i < data.size()) {
        auto b0 = data[i];
        if (b0 < 0x80) {
            push(t, b0, i, false);
            ++i;
            continue;
        }
        std::size_t need = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((b0 & 0xE0) == 0xC0) { need = 1; cp = b0 & 0x1F; min = 0x80; }
        else if ((b0 & 0xF0) == 0xE0) { need = 2; cp = b0 & 0x0F; min = 0x800; }
        else if ((b0 & 0xF8) == 0xF0) { need = 3; cp = b0 & 0x07; min = 0x10000; }
        bool ok = need > 0 && i + need < data.size();
        for (std::size_t k = 1; ok && k <= need; ++k) {
            if ((data[i + k] & 0xC0) != 0x80) ok = false;
            else cp = (cp << 6) | (data[i + k] & 0x3F);
        }
        if (ok && (cp < min || cp > 0x10FFFF || is_surrogate(cp))) ok = false;
        if (!ok) {
            push(t, replacement_char, i, true);
            ++i;
            continue;
        }
        push(t, cp, i, false);
        i += need + 1;
    }
}

void decode_utf16(CanonicalText& t, ByteView data, std::size_t start, bool le) {
    auto unit = [&](std::size_t pos) -> char32_t {
        return le ? static_cast<char32_t>(data[pos] | (data[pos + 1] << 8))
                  : static_cast<char32_t>((data[pos] << 8) | data[pos + 1]);
    };
    std::size_t i = start;
    while (i + 1 < data.size()) {
        char32_t u = unit(i);
        if (u >= 0xD800 && u <= 0xDBFF && i + 3 < data.size()) {
            char32_t lo = unit(i + 2);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
                push(t, 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00), i, false);
                i += 4;
                continue;
            }
        }
        if (is_surrogate(u)) push(t, replacement_char, i, true);
        else push(t, u, i, false);
        i += 2;
    }
    if (i < data.size()) push(t, replacement_char, i, true); // odd trailing byte
}

} // namespace

CanonicalText decode_text(ByteView data, const ContentClass& cls) {
    if (!cls.is_text()) throw Error(Errc::invalid_argument, "decode_text requires text content");
    CanonicalText t;
    t.encoding = cls.encoding;
    std::size_t start = 0;
    switch (cls.encoding) {
    case TextEncoding::utf8:
        if (starts_with(data, {0xEF, 0xBB, 0xBF})) start = 3;
        break;
    case TextEncoding::utf16le:
        if (starts_with(data, {0xFF, 0xFE})) start = 2;
        break;
    case TextEncoding::utf16be:
        if (starts_with(data, {0xFE, 0xFF})) start = 2;
        break;
    case TextEncoding::ascii:
        break;
    }
    t.bom_length = start;
    t.code_points.reserve(data.size());
    t.offsets.reserve(data.size());
    switch (cls.encoding) {
    case TextEncoding::ascii:
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data[i] < 0x80) push(t, data[i], i, false);
            else push(t, replacement_char, i, true);
        }
        break;
    case TextEncoding::utf8:
        decode_utf8(t, data, start);
        break;
    case TextEncoding::utf16le:
        decode_utf16(t, data, start, true);
        break;
    case TextEncoding::utf16be:
        decode_utf16(t, data, start, false);
        break;
    }
    t.consumed = data.size();
    return t;
}

CanonicalText canonical_from_utf8(std::string_view text) {
    auto bytes = ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
    return decode_text(bytes, {ContentKind::text, TextEncoding::utf8, false});
}

Bytes encode_text(std::u32string_view code_points, TextEncoding encoding) {
    Bytes out;
    switch (encoding) {
    case TextEncoding::ascii:
        for (auto cp : code_points) out.push_back(cp < 0x80 ? static_cast<std::uint8_t>(cp) : '?');
        break;
    case TextEncoding::utf8: {
        std::string s = to_utf8(code_points);
        out.assign(s.begin(), s.end());
        break;
    }
    case TextEncoding::utf16le:
    case TextEncoding::utf16be: {
        const bool le = encoding == TextEncoding::utf16le;
        auto put = [&](char32_t u) {
            auto hi = static_cast<std::uint8_t>(u >> 8);
            auto lo = static_cast<std::uint8_t>(u);
            if (le) { out.push_back(lo); out.push_back(hi); }
            else { out.push_back(hi); out.push_back(lo); }
        };
        for (auto cp : code_points) {
            if (cp >= 0x10000) {
                cp -= 0x10000;
                put(0xD800 + (cp >> 10));
                put(0xDC00 + (cp & 0x3FF));
            } else {
                put(cp);
            }
        }
        break;
    }
    }
    return out;
}

} // namespace casefile
