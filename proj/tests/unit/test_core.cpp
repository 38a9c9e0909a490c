// casefile - offline artifact analysis workbench

#include <casefile/core/bytes.hpp>
#include <casefile/core/error.hpp>
#include <casefile/core/unicode.hpp>

#include <doctest.h>

using namespace casefile;

TEST_SUITE("core") {

TEST_CASE("bounded loads throw instead of reading past the end") {
    const Bytes b{0x01, 0x02, 0x03, 0x04, 0x05};
    CHECK(load_le16(b, 0) == 0x0201);
    CHECK(load_be16(b, 0) == 0x0102);
    CHECK(load_le32(b, 1) == 0x05040302u);
    CHECK(load_be32(b, 0) == 0x01020304u);
    CHECK_THROWS_AS(load_le32(b, 2), Error);
    CHECK_THROWS_AS(load_le64(b, 0), Error);
    try {
        slice(b, 4, 2);
        FAIL("slice should throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::out_of_bounds);
    }
}

TEST_CASE("range arithmetic does not overflow") {
    const Bytes b(10);
    CHECK(in_bounds(b, 10, 0));
    CHECK_FALSE(in_bounds(b, 11, 0));
    CHECK_FALSE(in_bounds(b, 2, UINT64_MAX));
    ByteRange r{4, 3};
    CHECK(r.end() == 7);
    CHECK(r.contains(6));
    CHECK_FALSE(r.contains(7));
    CHECK(r.within(7));
    CHECK_FALSE(r.within(6));
    CHECK(ByteRange{UINT64_MAX, 2}.within(UINT64_MAX) == false);
}

TEST_CASE("hex and search helpers") {
    CHECK(to_hex(Bytes{0x00, 0xAB, 0x10}) == "00ab10");
    const auto hay = to_bytes("abcabcab");
    CHECK(find_bytes(hay, to_bytes("cab")) == 2);
    CHECK(find_bytes(hay, to_bytes("cab"), 3) == 5);
    CHECK(find_bytes(hay, to_bytes("zz")) == SIZE_MAX);
    CHECK(starts_with(hay, {'a', 'b'}));
    CHECK_FALSE(starts_with(Bytes{'a'}, {'a', 'b'}));
}

TEST_CASE("utf8 round trip and replacement of malformed input") {
    const std::u32string text = U"aé中\U0001F600";
    CHECK(from_utf8(to_utf8(text)) == text);
    const auto bad = from_utf8(std::string("a\xff" "b"));
    CHECK(bad == std::u32string{U'a', replacement_char, U'b'});
    CHECK(from_utf8(std::string("\xed\xa0\x80")).find(replacement_char) != std::u32string::npos);
    CHECK(is_combining_mark(0x0301));
    CHECK_FALSE(is_combining_mark(U'a'));
}

TEST_CASE("file helpers report io errors") {
    try {
        read_file("/nonexistent/casefile/file");
        FAIL("expected io error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io);
    }
}

}
