// casefile - offline artifact analysis workbench
// Content digests (CRC32, MD5, SHA1, SHA256) as lowercase hex

#pragma once

#include <casefile/core/bytes.hpp>

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace casefile {

enum class HashAlgorithm { crc32, md5, sha1, sha256 };

const char* to_string(HashAlgorithm algorithm) noexcept;

/// Accepts "crc32", "md5", "sha1", "sha256" (case-insensitive, "sha-256" too).
HashAlgorithm parse_hash_algorithm(std::string_view name);

std::size_t digest_hex_length(HashAlgorithm algorithm) noexcept;

using DigestSet = std::map<HashAlgorithm, std::string>;

DigestSet hash_buffer(ByteView data, std::span<const HashAlgorithm> algorithms);
DigestSet hash_buffer(ByteView data, std::span<const std::string> algorithm_names);

std::uint32_t crc32(ByteView data, std::uint32_t seed = 0);
std::array<std::uint8_t, 32> sha256(ByteView data);

} // namespace casefile
