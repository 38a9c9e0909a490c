// casefile - offline artifact analysis workbench
// ZIP archives: central-directory listing, stored/deflate extraction and
// traditional (ZipCrypto) decryption with CRC verification.

#pragma once

#include <casefile/core/bytes.hpp>
#include <casefile/engine/identification.hpp>

#include <optional>
#include <string>
#include <vector>

namespace casefile {

namespace zip_method {
inline constexpr std::uint16_t stored = 0;
inline constexpr std::uint16_t deflate = 8;
inline constexpr std::uint16_t aes = 99;
} // namespace zip_method

struct ZipEntry {
    std::string name;
    std::uint16_t method = 0;
    std::uint16_t flags = 0;
    std::uint32_t crc32 = 0;
    std::uint64_t compressed_size = 0;
    std::uint64_t uncompressed_size = 0;
    std::uint64_t local_header_offset = 0; ///< adjusted for prepended data
    std::uint16_t mod_time = 0;
    std::uint16_t mod_date = 0;

    bool encrypted() const noexcept { return flags & 0x1; }
    bool aes() const noexcept { return method == zip_method::aes || (flags & 0x40); }
    bool directory() const noexcept { return !name.empty() && name.back() == '/'; }
    bool method_supported() const noexcept {
        return method == zip_method::stored || method == zip_method::deflate;
    }
    std::string method_name() const; ///< "Stored", "Deflate", "AES", "method 12"
};

struct ZipArchive {
    std::vector<ZipEntry> entries;
    std::string comment;
    std::uint64_t eocd_offset = 0;
    std::uint64_t central_directory_offset = 0; ///< actual position in the buffer
    std::uint64_t prefix_length = 0;            ///< bytes in front of the archive proper
    std::vector<std::string> mismatches;         ///< central vs local header disagreements
};

inline constexpr std::size_t eocd_search_window = 65557;
inline constexpr std::uint64_t max_entry_size = 512ull << 20;

bool looks_like_zip(ByteView data) noexcept;

/// Central directory is authoritative. Throws bad_format when no EOCD is
/// found, out_of_bounds for a directory outside the buffer and unsupported
/// for ZIP64.
ZipArchive parse_zip(ByteView data);

/// Output length equals uncompressed_size and its CRC32 matches the entry.
/// Errors: password_required, wrong_password, unsupported (method, AES),
/// checksum_mismatch, out_of_bounds.
Bytes zip_extract(ByteView data, const ZipArchive& archive, std::size_t index,
                  const std::optional<std::string>& password = std::nullopt);

std::vector<SecurityHint> zip_hints(const ZipArchive& archive);

/// Traditional PKWARE stream cipher, exposed for fixtures and tests.
class ZipCrypto {
public:
    explicit ZipCrypto(std::string_view password);
    std::uint8_t decrypt(std::uint8_t c) noexcept;
    std::uint8_t encrypt(std::uint8_t p) noexcept;

private:
    std::uint8_t stream_byte() const noexcept;
    void update(std::uint8_t p) noexcept;
    std::uint32_t k0_ = 0x12345678u, k1_ = 0x23456789u, k2_ = 0x34567890u;
};

} // namespace casefile
