// casefile - offline artifact analysis workbench
// ASCII and UTF-16LE string runs with exact offsets

#pragma once

#include <casefile/core/bytes.hpp>

#include <string>
#include <vector>

namespace casefile {

enum class StringEncoding { ascii, utf16le };

const char* to_string(StringEncoding encoding) noexcept;

struct LocatedString {
    std::string value; ///< printable ASCII in both cases
    StringEncoding encoding = StringEncoding::ascii;
    std::uint64_t offset = 0;
    std::uint64_t byte_length = 0;

    friend bool operator==(const LocatedString&, const LocatedString&) = default;
};

inline constexpr std::size_t default_min_string_length = 5;

bool is_printable_string_byte(std::uint8_t b) noexcept;

/// Maximal printable runs of at least min_length characters, both encodings,
/// sorted by offset then encoding. UTF-16 runs are found at either alignment.
std::vector<LocatedString> extract_strings(ByteView data, std::size_t min_length = default_min_string_length);

} // namespace casefile
