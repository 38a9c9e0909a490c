// casefile - offline artifact analysis workbench

#include "fixtures.hpp"

#include <casefile/core/error.hpp>
#include <casefile/zip/zip.hpp>

#include <doctest.h>

using namespace casefile;
using namespace casefile::fixtures;

namespace {

Errc error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::io;
}

Bytes text(std::size_t n) {
    Bytes b;
    for (std::size_t i = 0; i < n; ++i) b.push_back(static_cast<std::uint8_t>("lorem ipsum "[i % 12]));
    return b;
}

} // namespace

TEST_SUITE("zip") {

TEST_CASE("stored and deflated entries round trip") {
    const auto z = build_zip({{"a.txt", text(1000), false}, {"dir/b.txt", text(5000), true}, {"empty", {}, true}});
    const auto a = parse_zip(z);
    REQUIRE(a.entries.size() == 3);
    CHECK(a.entries[0].method_name() == "Stored");
    CHECK(a.entries[1].method_name() == "Deflate");
    CHECK(a.entries[1].compressed_size < 5000);
    CHECK(zip_extract(z, a, 0) == text(1000));
    CHECK(zip_extract(z, a, 1) == text(5000));
    CHECK(zip_extract(z, a, 2).empty());
    CHECK(a.prefix_length == 0);
    CHECK(error_of([&] { zip_extract(z, a, 3); }) == Errc::out_of_bounds);
}

TEST_CASE("ZipCrypto entries need the right password") {
    for (bool dd : {false, true}) {
        const auto z = build_zip({{"s.bin", text(300), true, std::string("hunter2"), dd}});
        const auto a = parse_zip(z);
        CHECK(a.entries[0].encrypted());
        CHECK(zip_extract(z, a, 0, std::string("hunter2")) == text(300));
        CHECK(error_of([&] { zip_extract(z, a, 0); }) == Errc::password_required);
        CHECK(error_of([&] { zip_extract(z, a, 0, std::string("hunter3")); }) == Errc::wrong_password);
    }
}

TEST_CASE("corruption is reported as a checksum mismatch") {
    auto z = build_zip({{"a.txt", text(100), false}});
    z[30 + 5 + 10] ^= 0x01; // inside the stored data
    const auto a = parse_zip(z);
    CHECK(error_of([&] { zip_extract(z, a, 0); }) == Errc::checksum_mismatch);
}

TEST_CASE("prepended data shifts offsets") {
    Bytes z = to_bytes("MZ-stub-bytes-before-the-archive");
    const auto prefix = z.size();
    const auto archive = build_zip({{"x", text(64), true}});
    z.insert(z.end(), archive.begin(), archive.end());
    const auto a = parse_zip(z);
    CHECK(a.prefix_length == prefix);
    CHECK(zip_extract(z, a, 0) == text(64));
}

TEST_CASE("missing end record and hints") {
    CHECK(error_of([] { parse_zip(to_bytes("PK\x03\x04 not really")); }) == Errc::bad_format);
    const auto z = build_zip({{"e", text(10), false, std::string("pw")}});
    const auto hints = zip_hints(parse_zip(z));
    REQUIRE_FALSE(hints.empty());
    CHECK(hints[0].text.find("password-protected") != std::string::npos);
}

TEST_CASE("ZipCrypto encrypt and decrypt are inverse") {
    ZipCrypto enc("key"), dec("key");
    for (int i = 0; i < 256; ++i) CHECK(dec.decrypt(enc.encrypt(static_cast<std::uint8_t>(i))) == i);
}

}
