// casefile - offline artifact analysis workbench
// Digests are computed with zlib (CRC32) and OpenSSL EVP (MD5/SHA1/SHA256).

#include <casefile/extract/digest.hpp>

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <memory>
#include <vector>

namespace casefile {

const char* to_string(HashAlgorithm algorithm) noexcept {
    switch (algorithm) {
    case HashAlgorithm::crc32: return "crc32";
    case HashAlgorithm::md5: return "md5";
    case HashAlgorithm::sha1: return "sha1";
    case HashAlgorithm::sha256: return "sha256";
    }
    return "?";
}

HashAlgorithm parse_hash_algorithm(std::string_view name) {
    std::string n;
    for (char c : name) {
        if (c == '-' || c == '_') continue;
        n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (n == "crc32") return HashAlgorithm::crc32;
    if (n == "md5") return HashAlgorithm::md5;
    if (n == "sha1") return HashAlgorithm::sha1;
    if (n == "sha256") return HashAlgorithm::sha256;
    throw Error(Errc::invalid_argument, "unknown hash algorithm: " + std::string(name));
}

std::size_t digest_hex_length(HashAlgorithm algorithm) noexcept {
    switch (algorithm) {
    case HashAlgorithm::crc32: return 8;
    case HashAlgorithm::md5: return 32;
    case HashAlgorithm::sha1: return 40;
    case HashAlgorithm::sha256: return 64;
    }
    return 0;
}

std::uint32_t crc32(ByteView data, std::uint32_t seed) {
    uLong crc = seed;
    // zlib takes uInt lengths; feed large buffers in chunks
    std::size_t off = 0;
    do {
        auto n = static_cast<uInt>(std::min<std::size_t>(data.size() - off, 1u << 30));
        crc = ::crc32(crc, data.data() + off, n);
        off += n;
    } while (off < data.size());
    return static_cast<std::uint32_t>(crc);
}

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

std::vector<std::uint8_t> evp_digest(const EVP_MD* md, ByteView data) {
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    std::vector<std::uint8_t> out(EVP_MAX_MD_SIZE);
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1) {
        throw Error(Errc::unsupported, "digest backend failure");
    }
    out.resize(len);
    return out;
}

std::string hex_digest(ByteView data, HashAlgorithm algorithm) {
    switch (algorithm) {
    case HashAlgorithm::crc32: {
        char buf[9];
        std::snprintf(buf, sizeof buf, "%08x", crc32(data));
        return buf;
    }
    case HashAlgorithm::md5: return to_hex(evp_digest(EVP_md5(), data));
    case HashAlgorithm::sha1: return to_hex(evp_digest(EVP_sha1(), data));
    case HashAlgorithm::sha256: return to_hex(evp_digest(EVP_sha256(), data));
    }
    return {};
}

} // namespace

std::array<std::uint8_t, 32> sha256(ByteView data) {
    auto d = evp_digest(EVP_sha256(), data);
    std::array<std::uint8_t, 32> out{};
    std::copy_n(d.begin(), 32, out.begin());
    return out;
}

DigestSet hash_buffer(ByteView data, std::span<const HashAlgorithm> algorithms) {
    if (algorithms.empty()) throw Error(Errc::invalid_argument, "no hash algorithm requested");
    DigestSet set;
    for (auto a : algorithms) {
        if (!set.count(a)) set.emplace(a, hex_digest(data, a));
    }
    return set;
}

DigestSet hash_buffer(ByteView data, std::span<const std::string> algorithm_names) {
    std::vector<HashAlgorithm> algs;
    for (const auto& n : algorithm_names) algs.push_back(parse_hash_algorithm(n));
    return hash_buffer(data, algs);
}

} // namespace casefile
