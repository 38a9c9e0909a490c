// casefile - offline artifact analysis workbench

#include "fixtures.hpp"

#include <casefile/core/error.hpp>
#include <casefile/pe/pe.hpp>

#include <doctest.h>

using namespace casefile;
using namespace casefile::fixtures;

namespace {

PeSpec sample_spec() {
    PeSpec s;
    s.imports = {{"KERNEL32.dll", {"CreateFileW", "ExitProcess"}, {7}}};
    s.sections = {{".text", scn_code, Bytes{0x6A, 0x00, 0xC3}, {}, 0}};
    s.entry_section = ".text";
    s.exports = ExportSpec{"lib.dll", {"Zeta", "Alpha"}};
    s.version_strings = {{"CompanyName", "Example Corp"}, {"ProductName", "Widget"}};
    s.icon_dib = icon_dib_4bpp([](unsigned x, unsigned y) { return static_cast<std::uint8_t>((x + y) & 15); });
    s.overlay = to_bytes("OVERLAYDATA");
    return s;
}

} // namespace

TEST_SUITE("pe") {

TEST_CASE("headers, sections and directories") {
    const auto image = build_pe(sample_spec());
    CHECK(looks_like_pe(image));
    const auto pe = parse_pe(image);
    CHECK_FALSE(pe.pe32_plus);
    CHECK(pe.image_base == 0x400000);
    CHECK(pe.e_lfanew == 0x80);
    REQUIRE(pe.sections.size() == 4);
    CHECK(pe.sections[0].name == ".idata");
    CHECK(pe.sections[1].name == ".text");
    CHECK(pe.sections[1].executable());
    CHECK(pe.entry_point == pe.sections[1].virtual_address);
}

TEST_CASE("imports by name and ordinal") {
    const auto pe = parse_pe(build_pe(sample_spec()));
    REQUIRE(pe.imports.size() == 1);
    const auto& lib = pe.imports[0];
    CHECK(lib.name == "KERNEL32.dll");
    REQUIRE(lib.functions.size() == 3);
    CHECK(lib.functions[0].display() == "CreateFileW");
    CHECK(lib.functions[2].display() == "#7");
    CHECK(lib.functions[1].iat_rva == lib.functions[0].iat_rva + 4);
}

TEST_CASE("exports are sorted by name with base 1 ordinals") {
    const auto pe = parse_pe(build_pe(sample_spec()));
    REQUIRE(pe.exports);
    CHECK(pe.exports->module_name == "lib.dll");
    REQUIRE(pe.exports->entries.size() == 2);
    CHECK(pe.exports->entries[0].name == "Alpha");
    CHECK(pe.exports->entries[0].ordinal == 1);
}

TEST_CASE("version strings and icons from resources") {
    const auto pe = parse_pe(build_pe(sample_spec()));
    const auto v = pe_version_info(pe);
    CHECK(v.at("CompanyName") == "Example Corp");
    CHECK(v.at("ProductName") == "Widget");
    const auto icons = pe_icons(pe);
    REQUIRE(icons.size() == 1);
    CHECK(icons[0].width == 16);
    REQUIRE(icons[0].image);
    CHECK(icons[0].image->at(1, 0) == icons[0].image->at(0, 1));
}

TEST_CASE("overlay and signature") {
    auto spec = sample_spec();
    const auto image = build_pe(spec);
    auto pe = parse_pe(image);
    REQUIRE(pe.overlay);
    CHECK(pe.overlay->end() == image.size());
    CHECK(as_chars(slice(image, *pe.overlay)) == "OVERLAYDATA");
    CHECK_FALSE(pe.signature_present);
    spec.signature = true;
    pe = parse_pe(build_pe(spec));
    CHECK(pe.signature_present);
    spec.overlay.clear();
    spec.signature = false;
    CHECK_FALSE(parse_pe(build_pe(spec)).overlay);
}

TEST_CASE("hints flag vendor impersonation and SFX stubs") {
    auto spec = sample_spec();
    spec.version_strings = {{"CompanyName", "Microsoft Corporation"}};
    spec.exports = ExportSpec{"sfxzip.exe", {"SfxMain"}};
    const auto hints = pe_hints(parse_pe(build_pe(spec)));
    auto has = [&](std::string_view needle) {
        return std::any_of(hints.begin(), hints.end(), [&](const SecurityHint& h) {
            return h.text.find(needle) != std::string::npos;
        });
    };
    CHECK(has("claims Microsoft"));
    CHECK(has("sfxzip.exe"));
    CHECK(well_known_vendor("Microsoft Corporation").has_value());
    CHECK_FALSE(well_known_vendor("Example Corp").has_value());
}

TEST_CASE("64-bit images") {
    auto spec = sample_spec();
    spec.bitness = 64;
    spec.image_base = 0x140000000ull;
    const auto pe = parse_pe(build_pe(spec));
    CHECK(pe.pe32_plus);
    CHECK(pe.image_base == 0x140000000ull);
    CHECK(pe.imports[0].functions[1].iat_rva == pe.imports[0].functions[0].iat_rva + 8);
    CHECK(pe.imports[0].functions[2].display() == "#7");
}

TEST_CASE("malformed images are rejected with bad_format or out_of_bounds") {
    const auto image = build_pe(sample_spec());
    CHECK_THROWS_AS(parse_pe(Bytes(image.begin(), image.begin() + 0x90)), Error);
    Bytes broken = image;
    broken[0x80] = 'X';
    CHECK_FALSE(looks_like_pe(broken));
    CHECK_THROWS_AS(parse_pe(broken), Error);
    Bytes far = image;
    far[0x3C] = 0xF0;
    far[0x3D] = 0xFF;
    CHECK_THROWS_AS(parse_pe(far), Error);
}

}
