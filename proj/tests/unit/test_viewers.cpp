// casefile - offline artifact analysis workbench

#include "fixtures.hpp"

#include <casefile/core/error.hpp>
#include <casefile/view/viewers.hpp>
#include <casefile/zip/zip.hpp>

#include <doctest.h>

#include <cstring>
#include <random>

using namespace casefile;
using namespace casefile::fixtures;

TEST_SUITE("viewers") {

TEST_CASE("hex rendering round-trips through the parser") {
    std::mt19937 rng(11);
    for (std::size_t len : {0u, 1u, 15u, 16u, 17u, 1000u}) {
        Bytes data(len);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng());
        for (std::size_t width : {8u, 16u, 32u}) {
            BufferViewModel m;
            m.bytes_per_line = width;
            const auto lines = render_buffer_view(data, m);
            CHECK(lines.size() == line_count(data, width));
            CHECK(parse_hex_lines(lines) == data);
        }
    }
}

TEST_CASE("line format and paging") {
    const auto data = to_bytes("ABCDEFGHIJKLMNOPQRSTUVWXYZ");
    BufferViewModel m;
    const auto lines = render_buffer_view(data, m, 1, 1);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].rfind("00000010  51 52", 0) == 0);
    CHECK(lines[0].find("|QRSTUVWXYZ|") != std::string::npos);
}

TEST_CASE("zones are marked on the lines they cover") {
    const Bytes data(48, 0);
    BufferViewModel m;
    m.zones = {{{20, 4}, "header", "zone.header"}};
    const auto lines = render_buffer_view(data, m);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].find("header") == std::string::npos);
    CHECK(lines[1].find("header") != std::string::npos);
    CHECK(lines[2].find("header") == std::string::npos);
}

TEST_CASE("interpretations at an offset") {
    Bytes data(16, 0);
    const double d = 1.5;
    std::memcpy(data.data(), &d, 8);
    auto has = [](const std::vector<Inference>& v, InferenceKind k, const std::string& value) {
        for (const auto& i : v) {
            if (i.kind == k && i.value == value) return true;
        }
        return false;
    };
    CHECK(has(infer_at(data, 0), InferenceKind::float64, "1.5"));
    const auto text = to_bytes(std::string_view("pass\0\0\0\0", 8));
    CHECK(has(infer_at(text, 0), InferenceKind::ascii_string, "pass"));
    CHECK(infer_at(text, 8).empty());
    const Bytes nan{0, 0, 0xC0, 0x7F};
    for (const auto& i : infer_at(nan, 0)) CHECK(i.kind != InferenceKind::float32);
}

TEST_CASE("lexical view hides comments and folds function bodies") {
    const auto src = U"// head\nfunction f(a) { return a + 1; }\nvar x = \"s\";";
    auto m = make_lexical_view(src);
    auto text = join_lines(render_lexical_view(m));
    CHECK(text.find("head") == std::string::npos);
    CHECK(text.find("var x") != std::string::npos);
    m.folds = function_body_folds(m.tokens);
    REQUIRE(m.folds.size() == 1);
    text = join_lines(render_lexical_view(m));
    CHECK(text.find("return") == std::string::npos);
    CHECK(text.find(std::string(fold_marker)) != std::string::npos);
    m.hidden.clear();
    m.folds.clear();
    CHECK(join_lines(render_lexical_view(m)) == "// head\nfunction f(a) { return a + 1; }\nvar x = \"s\";");
}

TEST_CASE("styled spans stay inside their lines") {
    const auto m = make_lexical_view(U"var s = 'x';\nif (s) { s = /re/g; }");
    for (const auto& line : render_lexical_view(m)) {
        for (const auto& sp : line.spans) {
            CHECK(sp.begin < sp.end);
            CHECK(sp.end <= line.text.size());
            CHECK_FALSE(sp.style.empty());
        }
    }
}

TEST_CASE("container view of an archive") {
    const auto zip = build_zip({{"a.txt", to_bytes("hello"), false, std::nullopt},
                                {"b.bin", Bytes(100, 1), true, std::string("pw")}});
    const auto view = container_view(parse_zip(zip));
    REQUIRE(view.entries.size() == 2);
    CHECK(view.entries[0].name == "a.txt");
    CHECK(view.entries[0].size == 5);
    CHECK(view.entries[1].attributes.find("encrypted") != std::string::npos);
    const auto lines = render_container_view(view);
    CHECK(lines.size() >= 2);
}

TEST_CASE("PPM output") {
    ImageModel img;
    img.width = 2;
    img.height = 1;
    img.pixels = {{255, 0, 0, 255}, {0, 0, 255, 255}};
    const auto ppm = render_ppm(img);
    const std::string head = "P6\n2 1\n255\n";
    REQUIRE(ppm.size() == head.size() + 6);
    CHECK(std::string(ppm.begin(), ppm.begin() + static_cast<long>(head.size())) == head);
    CHECK(ppm[head.size()] == 255);
    CHECK(ppm[head.size() + 5] == 255);
}

TEST_CASE("table columns are aligned") {
    const auto lines = render_table({"name", "v"}, {{"a", "1"}, {"long name", "22"}});
    REQUIRE(lines.size() >= 3);
    const auto col = lines[0].find('v');
    for (const auto& l : lines) {
        if (l.find_first_not_of("- ") == std::string::npos) continue;
        CHECK(l.size() > col);
    }
    CHECK(lines.back().substr(0, 9) == "long name");
    CHECK(lines.back().find("22") == col);
}

TEST_CASE("selection sync notifies the other subscribers") {
    SelectionState s;
    s.buffer_length = 100;
    s.subscribers = {"hex", "lexical", "strings"};
    const auto u = sync_selection(s, {10, 5}, "hex");
    CHECK(u.state.active.offset == 10);
    CHECK(u.state.cursor == 10);
    CHECK(u.notified == std::vector<std::string>{"lexical", "strings"});
    try {
        sync_selection(s, {98, 5}, "hex");
        FAIL("expected out_of_bounds");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::out_of_bounds);
    }
    CHECK(s.active.length == 0);
}

}
