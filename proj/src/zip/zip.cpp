// casefile - offline artifact analysis workbench

#include <casefile/zip/zip.hpp>

#include <casefile/extract/digest.hpp>

#include <zlib.h>

#include <algorithm>

namespace casefile {

namespace {

constexpr std::uint32_t local_sig = 0x04034b50u;
constexpr std::uint32_t central_sig = 0x02014b50u;
constexpr std::uint32_t eocd_sig = 0x06054b50u;
constexpr std::uint32_t zip64_locator_sig = 0x07064b50u;

std::uint32_t crc_byte(std::uint32_t crc, std::uint8_t b) noexcept {
    static const z_crc_t* table = get_crc_table();
    return static_cast<std::uint32_t>(table[(crc ^ b) & 0xFF]) ^ (crc >> 8);
}

Bytes inflate_raw(ByteView input, std::uint64_t expected, bool& ok) {
    // One spare byte: next_out is never null and an overlong stream shows up
    // as total_out > expected.
    Bytes out(static_cast<std::size_t>(expected) + 1);
    z_stream zs{};
    ok = false;
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) return {};
    zs.next_in = const_cast<Bytef*>(input.data());
    zs.avail_in = static_cast<uInt>(input.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    ok = rc == Z_STREAM_END && zs.total_out == expected;
    inflateEnd(&zs);
    out.resize(zs.total_out);
    return out;
}

} // namespace

std::string ZipEntry::method_name() const {
    if (aes()) return "AES";
    switch (method) {
    case zip_method::stored: return "Stored";
    case zip_method::deflate: return "Deflate";
    default: return "method " + std::to_string(method);
    }
}

ZipCrypto::ZipCrypto(std::string_view password) {
    for (char c : password) update(static_cast<std::uint8_t>(c));
}

void ZipCrypto::update(std::uint8_t p) noexcept {
    k0_ = crc_byte(k0_, p);
    k1_ = (k1_ + (k0_ & 0xFF)) * 134775813u + 1;
    k2_ = crc_byte(k2_, static_cast<std::uint8_t>(k1_ >> 24));
}

std::uint8_t ZipCrypto::stream_byte() const noexcept {
    const std::uint16_t t = static_cast<std::uint16_t>(k2_ | 2);
    return static_cast<std::uint8_t>((t * (t ^ 1)) >> 8);
}

std::uint8_t ZipCrypto::decrypt(std::uint8_t c) noexcept {
    const std::uint8_t p = c ^ stream_byte();
    update(p);
    return p;
}

std::uint8_t ZipCrypto::encrypt(std::uint8_t p) noexcept {
    const std::uint8_t c = p ^ stream_byte();
    update(p);
    return c;
}

bool looks_like_zip(ByteView data) noexcept {
    return starts_with(data, {'P', 'K', 3, 4}) || starts_with(data, {'P', 'K', 5, 6});
}

ZipArchive parse_zip(ByteView data) {
    ZipArchive a;
    if (data.size() < 22) throw Error(Errc::bad_format, "end of central directory not found");
    const std::uint64_t lowest = data.size() > eocd_search_window ? data.size() - eocd_search_window : 0;
    std::optional<std::uint64_t> eocd;
    for (std::uint64_t at = data.size() - 22 + 1; at-- > lowest;) {
        if (load_le32(data, at) != eocd_sig) continue;
        const auto comment_len = load_le16(data, at + 20);
        if (at + 22 + comment_len <= data.size()) {
            eocd = at;
            break;
        }
    }
    if (!eocd) throw Error(Errc::bad_format, "end of central directory not found");
    a.eocd_offset = *eocd;
    const auto disk = load_le16(data, *eocd + 4);
    const auto total = load_le16(data, *eocd + 10);
    const auto cd_size = load_le32(data, *eocd + 12);
    const auto cd_offset = load_le32(data, *eocd + 16);
    a.comment = std::string(as_chars(slice(data, *eocd + 22, load_le16(data, *eocd + 20))));
    if ((*eocd >= 20 && load_le32(data, *eocd - 20) == zip64_locator_sig) || total == 0xFFFF ||
        cd_size == 0xFFFFFFFFu || cd_offset == 0xFFFFFFFFu) {
        throw Error(Errc::unsupported, "ZIP64 archives are not supported");
    }
    if (disk != 0) throw Error(Errc::unsupported, "multi-volume archives are not supported");
    if (cd_size > *eocd) throw Error(Errc::out_of_bounds, "central directory out of bounds");
    const std::uint64_t actual_cd = *eocd - cd_size;
    if (actual_cd < cd_offset) throw Error(Errc::out_of_bounds, "central directory out of bounds");
    a.prefix_length = actual_cd - cd_offset;
    a.central_directory_offset = actual_cd;

    std::uint64_t at = actual_cd;
    for (std::size_t i = 0; i < total; ++i) {
        if (!in_bounds(data, at, 46) || at + 46 > *eocd) throw Error(Errc::out_of_bounds, "central directory out of bounds");
        if (load_le32(data, at) != central_sig) {
            throw Error(Errc::bad_format, "central directory entry " + std::to_string(i) + " has a bad signature");
        }
        ZipEntry e;
        e.flags = load_le16(data, at + 8);
        e.method = load_le16(data, at + 10);
        e.mod_time = load_le16(data, at + 12);
        e.mod_date = load_le16(data, at + 14);
        e.crc32 = load_le32(data, at + 16);
        e.compressed_size = load_le32(data, at + 20);
        e.uncompressed_size = load_le32(data, at + 24);
        const auto name_len = load_le16(data, at + 28);
        const auto extra_len = load_le16(data, at + 30);
        const auto comment_len = load_le16(data, at + 32);
        e.local_header_offset = std::uint64_t{load_le32(data, at + 42)} + a.prefix_length;
        e.name = std::string(as_chars(slice(data, at + 46, name_len)));
        if (e.local_header_offset >= actual_cd) {
            throw Error(Errc::out_of_bounds, "local header of " + e.name + " lies outside the archive");
        }
        a.entries.push_back(std::move(e));
        at += 46ull + name_len + extra_len + comment_len;
    }

    for (const auto& e : a.entries) {
        const auto lh = e.local_header_offset;
        if (!in_bounds(data, lh, 30) || load_le32(data, lh) != local_sig) {
            a.mismatches.push_back(e.name + ": local header signature missing");
            continue;
        }
        const auto name_len = load_le16(data, lh + 26);
        std::string local_name(as_chars(slice(data, lh + 30, std::min<std::uint64_t>(name_len, data.size() - lh - 30))));
        if (local_name != e.name) a.mismatches.push_back(e.name + ": local header names it " + local_name);
        if (load_le16(data, lh + 8) != e.method) a.mismatches.push_back(e.name + ": compression method differs");
        const auto lflags = load_le16(data, lh + 6);
        if (!(lflags & 0x8) && (load_le32(data, lh + 14) != e.crc32 || load_le32(data, lh + 18) != e.compressed_size ||
                                load_le32(data, lh + 22) != e.uncompressed_size)) {
            a.mismatches.push_back(e.name + ": sizes or CRC differ from the central directory");
        }
    }
    return a;
}

Bytes zip_extract(ByteView data, const ZipArchive& archive, std::size_t index, const std::optional<std::string>& password) {
    if (index >= archive.entries.size()) {
        throw Error(Errc::out_of_bounds, "entry index " + std::to_string(index) + " out of range");
    }
    const auto& e = archive.entries[index];
    if (e.aes()) throw Error(Errc::unsupported, e.name + ": AES-encrypted entries cannot be extracted");
    if (!e.method_supported()) throw Error(Errc::unsupported, e.name + ": unsupported compression " + e.method_name());
    if (e.uncompressed_size > max_entry_size) throw Error(Errc::unsupported, e.name + ": entry too large");
    const auto lh = e.local_header_offset;
    if (!in_bounds(data, lh, 30) || load_le32(data, lh) != local_sig) {
        throw Error(Errc::bad_format, e.name + ": local header signature missing");
    }
    const std::uint64_t data_at = lh + 30 + load_le16(data, lh + 26) + load_le16(data, lh + 28);
    if (!in_bounds(data, data_at, e.compressed_size)) throw Error(Errc::out_of_bounds, e.name + ": data out of bounds");
    ByteView payload = slice(data, data_at, e.compressed_size);

    Bytes plain;
    if (e.encrypted()) {
        if (!password) throw Error(Errc::password_required, e.name + ": password required");
        if (payload.size() < 12) throw Error(Errc::bad_format, e.name + ": encryption header truncated");
        ZipCrypto cipher(*password);
        std::uint8_t last = 0;
        for (std::size_t i = 0; i < 12; ++i) last = cipher.decrypt(payload[i]);
        const std::uint8_t check = (e.flags & 0x8) ? static_cast<std::uint8_t>(e.mod_time >> 8)
                                                   : static_cast<std::uint8_t>(e.crc32 >> 24);
        if (last != check) throw Error(Errc::wrong_password, e.name + ": wrong password");
        plain.reserve(payload.size() - 12);
        for (std::size_t i = 12; i < payload.size(); ++i) plain.push_back(cipher.decrypt(payload[i]));
        payload = plain;
    }
    const Errc failure = e.encrypted() ? Errc::wrong_password : Errc::checksum_mismatch;
    const char* failure_text = e.encrypted() ? ": wrong password" : ": CRC mismatch";
    Bytes out;
    if (e.method == zip_method::stored) {
        out.assign(payload.begin(), payload.end());
        if (out.size() != e.uncompressed_size) throw Error(failure, e.name + failure_text);
    } else {
        bool ok = false;
        out = inflate_raw(payload, e.uncompressed_size, ok);
        if (!ok) throw Error(failure, e.name + (e.encrypted() ? failure_text : ": corrupt deflate stream"));
    }
    if (crc32(out) != e.crc32) throw Error(failure, e.name + failure_text);
    return out;
}

std::vector<SecurityHint> zip_hints(const ZipArchive& archive) {
    std::vector<SecurityHint> hints;
    for (const auto& m : archive.mismatches) {
        hints.push_back({Severity::suspicious, "central directory and local header disagree: " + m, 0});
    }
    const auto encrypted = std::count_if(archive.entries.begin(), archive.entries.end(),
                                         [](const ZipEntry& e) { return e.encrypted(); });
    if (encrypted) {
        hints.push_back({Severity::suspicious,
                         "password-protected archive: " + std::to_string(encrypted) +
                             " encrypted entries hide their content from scanners", 0});
    }
    if (archive.prefix_length) {
        hints.push_back({Severity::info, "archive is preceded by " + std::to_string(archive.prefix_length) +
                                             " bytes of other data", 0});
    }
    return hints;
}

} // namespace casefile
