// casefile - offline artifact analysis workbench
// Byte buffers, ranges and bounds-checked little/big-endian loads

#pragma once

#include <casefile/core/error.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace casefile {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

struct ByteRange {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    std::uint64_t end() const noexcept { return offset + length; }
    bool empty() const noexcept { return length == 0; }
    bool contains(std::uint64_t pos) const noexcept { return pos >= offset && pos < end(); }
    bool within(std::uint64_t size) const noexcept {
        return offset <= size && length <= size - offset;
    }

    friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

/// "[start..end)" as used in action labels.
std::string to_string(const ByteRange& range);

inline bool in_bounds(ByteView data, std::uint64_t offset, std::uint64_t length) noexcept {
    return offset <= data.size() && length <= data.size() - offset;
}

/// Slice that throws out_of_bounds instead of invoking UB.
ByteView slice(ByteView data, std::uint64_t offset, std::uint64_t length);
inline ByteView slice(ByteView data, const ByteRange& range) {
    return slice(data, range.offset, range.length);
}

std::uint8_t load_u8(ByteView data, std::uint64_t offset);
std::uint16_t load_le16(ByteView data, std::uint64_t offset);
std::uint32_t load_le32(ByteView data, std::uint64_t offset);
std::uint64_t load_le64(ByteView data, std::uint64_t offset);
std::uint16_t load_be16(ByteView data, std::uint64_t offset);
std::uint32_t load_be32(ByteView data, std::uint64_t offset);

inline void store_le16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void store_le32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void store_le64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }
inline std::string_view as_chars(ByteView data) {
    return {reinterpret_cast<const char*>(data.data()), data.size()};
}

bool starts_with(ByteView data, std::initializer_list<std::uint8_t> magic) noexcept;

/// Lowercase hex, no separators.
std::string to_hex(ByteView data);

/// Offset of the first occurrence of needle at or after from, or npos.
std::size_t find_bytes(ByteView haystack, ByteView needle, std::size_t from = 0);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView data);

} // namespace casefile
