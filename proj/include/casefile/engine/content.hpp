// casefile - offline artifact analysis workbench
// Step one of identification: binary/text split and canonical decoding

#pragma once

#include <casefile/core/bytes.hpp>

#include <string>
#include <vector>

namespace casefile {

enum class ContentKind { binary, text };
enum class TextEncoding { ascii, utf8, utf16le, utf16be };

const char* to_string(TextEncoding encoding) noexcept;

struct ContentClass {
    ContentKind kind = ContentKind::binary;
    TextEncoding encoding = TextEncoding::ascii; ///< meaningful for text only
    bool has_bom = false;

    bool is_text() const noexcept { return kind == ContentKind::text; }
    friend bool operator==(const ContentClass&, const ContentClass&) = default;
};

inline constexpr std::size_t text_probe_window = 8192;
inline constexpr double text_printable_threshold = 0.90;

/// Text iff a BOM matches, or at least 90% of the first 8 KiB is printable
/// under a candidate encoding. Empty input is binary.
ContentClass classify_content(ByteView data);

/// Code points plus the byte offset each one starts at. Offsets are strictly
/// increasing and index the original buffer (a BOM is skipped, not decoded).
struct CanonicalText {
    std::u32string code_points;
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> replacements; ///< indices of U+FFFD produced by bad input
    TextEncoding encoding = TextEncoding::ascii;
    std::size_t bom_length = 0;
    std::size_t consumed = 0; ///< bytes covered, BOM included

    bool lossless() const noexcept { return replacements.empty(); }
    std::string utf8() const;
};

CanonicalText decode_text(ByteView data, const ContentClass& cls);

/// Convenience for in-memory text that never had a byte form.
CanonicalText canonical_from_utf8(std::string_view text);

/// Re-encodes code points (BOM not included).
Bytes encode_text(std::u32string_view code_points, TextEncoding encoding);

} // namespace casefile
