// casefile - offline artifact analysis workbench

#include <casefile/core/bytes.hpp>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

namespace casefile {

const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::out_of_bounds: return "out of bounds";
    case Errc::bad_format: return "bad format";
    case Errc::unsupported: return "unsupported";
    case Errc::not_found: return "not found";
    case Errc::duplicate: return "duplicate";
    case Errc::password_required: return "password required";
    case Errc::wrong_password: return "wrong password";
    case Errc::checksum_mismatch: return "checksum mismatch";
    case Errc::io: return "i/o error";
    }
    return "unknown";
}

std::string to_string(const ByteRange& range) {
    return "[" + std::to_string(range.offset) + ".." + std::to_string(range.end()) + ")";
}

ByteView slice(ByteView data, std::uint64_t offset, std::uint64_t length) {
    if (!in_bounds(data, offset, length)) {
        throw Error(Errc::out_of_bounds, "range " + to_string(ByteRange{offset, length}) +
                                             " exceeds buffer of " + std::to_string(data.size()) +
                                             " bytes");
    }
    return data.subspan(static_cast<std::size_t>(offset), static_cast<std::size_t>(length));
}

namespace {

void require(ByteView data, std::uint64_t offset, std::uint64_t width) {
    if (!in_bounds(data, offset, width)) {
        throw Error(Errc::out_of_bounds,
                    "read of " + std::to_string(width) + " bytes at offset " +
                        std::to_string(offset) + " is past end of " + std::to_string(data.size()) +
                        "-byte buffer");
    }
}

} // namespace

std::uint8_t load_u8(ByteView data, std::uint64_t offset) {
    require(data, offset, 1);
    return data[offset];
}

std::uint16_t load_le16(ByteView data, std::uint64_t offset) {
    require(data, offset, 2);
    return static_cast<std::uint16_t>(data[offset] | (data[offset + 1] << 8));
}

std::uint32_t load_le32(ByteView data, std::uint64_t offset) {
    require(data, offset, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | data[offset + i];
    return v;
}

std::uint64_t load_le64(ByteView data, std::uint64_t offset) {
    require(data, offset, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | data[offset + i];
    return v;
}

std::uint16_t load_be16(ByteView data, std::uint64_t offset) {
    require(data, offset, 2);
    return static_cast<std::uint16_t>((data[offset] << 8) | data[offset + 1]);
}

std::uint32_t load_be32(ByteView data, std::uint64_t offset) {
    require(data, offset, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data[offset + i];
    return v;
}

bool starts_with(ByteView data, std::initializer_list<std::uint8_t> magic) noexcept {
    return data.size() >= magic.size() && std::equal(magic.begin(), magic.end(), data.begin());
}

std::string to_hex(ByteView data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::size_t find_bytes(ByteView haystack, ByteView needle, std::size_t from) {
    if (needle.empty() || from > haystack.size()) return std::string::npos;
    auto it = std::search(haystack.begin() + static_cast<std::ptrdiff_t>(from), haystack.end(),
                          needle.begin(), needle.end());
    if (it == haystack.end()) return std::string::npos;
    return static_cast<std::size_t>(it - haystack.begin());
}

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::io, "cannot open " + path + ": " + std::strerror(errno));
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(Errc::io, "read failed: " + path);
    return data;
}

void write_file(const std::string& path, ByteView data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot create " + path + ": " + std::strerror(errno));
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(Errc::io, "write failed: " + path);
}

} // namespace casefile
