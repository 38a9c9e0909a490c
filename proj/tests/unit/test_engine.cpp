// casefile - offline artifact analysis workbench

#include <casefile/analysis/builtin.hpp>
#include <casefile/core/error.hpp>
#include <casefile/engine/session.hpp>

#include <doctest.h>

#include <filesystem>

using namespace casefile;

namespace {

IdentifierDescriptor probe_only(std::string tag, IdentMethod method, std::string_view prefix) {
    IdentifierDescriptor d;
    d.tag = std::move(tag);
    d.probe = [method, p = std::string(prefix)](ByteView data, std::string_view) -> std::optional<TypeIdentification> {
        if (as_chars(data).substr(0, p.size()) != p) return std::nullopt;
        return TypeIdentification{"", method};
    };
    d.viewer_plan = [](const std::any&, ByteView) { return make_plan({ViewerKind::buffer}); };
    return d;
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("content classification") {
    CHECK(classify_content(to_bytes("plain ascii text\n")).is_text());
    CHECK_FALSE(classify_content(Bytes{0, 1, 2, 3, 0xFF, 0xFE, 0x80, 0x81}).is_text());
    const Bytes bom16{0xFF, 0xFE, 'h', 0, 'i', 0};
    const auto c = classify_content(bom16);
    CHECK(c.is_text());
    CHECK(c.encoding == TextEncoding::utf16le);
    CHECK(c.has_bom);
    Bytes utf16;
    for (char ch : std::string("no byte order mark here")) {
        utf16.push_back(static_cast<std::uint8_t>(ch));
        utf16.push_back(0);
    }
    CHECK(classify_content(utf16).encoding == TextEncoding::utf16le);
    const auto text = decode_text(bom16, c);
    CHECK(text.utf8() == "hi");
    CHECK(text.bom_length == 2);
}

TEST_CASE("registry ranks magic over heuristic and falls back to generic tags") {
    IdentifierRegistry r;
    r.add(probe_only("SOFT", IdentMethod::heuristic, "AB"));
    r.add(probe_only("HARD", IdentMethod::magic, "ABC"));
    CHECK(r.identify(to_bytes("ABCD"), "") == TypeIdentification{"HARD", IdentMethod::magic});
    CHECK(r.identify(to_bytes("ABxx"), "") == TypeIdentification{"SOFT", IdentMethod::heuristic});
    CHECK(r.identify(to_bytes("hello world"), "").tag == "TEXT");
    CHECK(r.identify(Bytes{0, 0xFF, 3, 0x80}, "").tag == "BINARY");
    CHECK(r.known_tag("BINARY"));
    CHECK_FALSE(r.known_tag("NOPE"));
}

TEST_CASE("a throwing probe does not break identification") {
    IdentifierRegistry r;
    IdentifierDescriptor bad;
    bad.tag = "BAD";
    bad.probe = [](ByteView, std::string_view) -> std::optional<TypeIdentification> {
        throw Error(Errc::bad_format, "boom");
    };
    r.add(bad);
    CHECK(r.identify(to_bytes("text"), "").tag == "TEXT");
}

TEST_CASE("parse failure degrades to BINARY with a hint") {
    AnalysisSession s(builtin_registry());
    // ZIP magic without an end-of-central-directory record
    const auto& n = s.open_artifact(DataBuffer::external(to_bytes("PK\x03\x04 truncated"), "x.zip"));
    CHECK(n.tag() == "BINARY");
    CHECK(n.parse_error.has_value());
    REQUIRE(n.hints.size() == 1);
    CHECK(n.hints[0].severity == Severity::suspicious);
    CHECK(n.hints[0].text.find("ZIP parser rejected") == 0);
    CHECK(plan_summary(n.viewers) == "buffer");
}

TEST_CASE("derivations replay to identical bytes and record provenance") {
    AnalysisSession s(builtin_registry());
    const auto& root = s.open_artifact(DataBuffer::external(to_bytes("0123456789abcdef"), "root.bin"));
    const auto root_id = root.id;
    const auto& child = s.reanalyze_range(root_id, {4, 6});
    CHECK(as_chars(child.buffer.bytes()) == "456789");
    CHECK(child.action_label == "manual selection [4..10)");
    CHECK(s.replay(child.id) == to_bytes("456789"));
    CHECK(s.depth_of(child.id) == 1);
    CHECK(s.node(root_id).children == std::vector<NodeId>{child.id});
    CHECK_THROWS_AS(s.reanalyze_range(root_id, {10, 7}), Error);
    CHECK_THROWS_AS(s.node(999), Error);
    CHECK_THROWS_AS(s.reanalyze_range(root_id, {0, 2}, std::string("NOPE")), Error);
    const auto& forced = s.reanalyze_range(root_id, {0, 4}, std::string("TEXT"));
    CHECK(forced.identification.method == IdentMethod::user);
}

TEST_CASE("overview lists nodes depth first with hint counts") {
    AnalysisSession s(builtin_registry());
    const auto root = s.open_artifact(DataBuffer::external(to_bytes("PK\x03\x04 broken"), "a.zip")).id;
    s.reanalyze_range(root, {0, 2});
    const auto o = s.overview();
    REQUIRE(o.entries.size() == 2);
    CHECK(o.entries[0].hint_counts[static_cast<int>(Severity::suspicious)] == 1);
    CHECK(o.entries[1].depth == 1);
    const auto text = o.to_text();
    CHECK(text.find("#1 BINARY a.zip") != std::string::npos);
    CHECK(text.find("  #2 ") != std::string::npos);
}

TEST_CASE("folders become FOLDER nodes with sorted entries") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "casefile-engine-folder";
    fs::remove_all(dir);
    fs::create_directories(dir / "sub");
    write_file((dir / "b.txt").string(), to_bytes("bee"));
    write_file((dir / "a.txt").string(), to_bytes("a"));
    AnalysisSession s(builtin_registry());
    const auto& n = s.open_file(dir.string());
    CHECK(n.tag() == "FOLDER");
    const auto* m = n.model_as<FolderModel>();
    REQUIRE(m);
    REQUIRE(m->entries.size() == 3);
    CHECK(m->entries[0].name == "a.txt");
    CHECK(m->entries[1].size == 3);
    CHECK(m->entries[2].directory);
    fs::remove_all(dir);
}

}
