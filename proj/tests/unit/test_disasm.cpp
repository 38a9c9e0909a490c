// casefile - offline artifact analysis workbench

#include "fixtures.hpp"

#include <casefile/disasm/x86.hpp>
#include <casefile/pe/pe.hpp>

#include <doctest.h>

using namespace casefile;
using namespace casefile::fixtures;

namespace {

std::vector<std::string> texts(const std::vector<Instruction>& insns) {
    std::vector<std::string> out;
    for (const auto& i : insns) out.push_back(i.text());
    return out;
}

void put32(Bytes& b, std::uint64_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

} // namespace

TEST_SUITE("disasm") {

TEST_CASE("32-bit prologue, memory operands and branches") {
    const Bytes code{0x55, 0x89, 0xE5, 0x8B, 0x45, 0xF8, 0x83, 0xEC, 0x10, 0x74, 0x02, 0xEB, 0xFE, 0xC3};
    const auto insns = linear_sweep(code, 0, code.size(), 32, 0x1000);
    CHECK(texts(insns) == std::vector<std::string>{"push ebp", "mov ebp,esp", "mov eax,DWORD PTR [ebp-0x8]",
                                                   "sub esp,0x10", "je 0x100d", "jmp 0x100b", "ret"});
    CHECK(insns[0].cls == InsnClass::push);
    CHECK(insns[3].writes_stack_pointer);
    CHECK(insns[4].cls == InsnClass::cond_jump);
    CHECK(insns[4].branch_target == 0x100d);
    CHECK(insns[6].cls == InsnClass::ret);
}

TEST_CASE("64-bit REX and RIP-relative addressing") {
    const Bytes code{0x48, 0x89, 0xC8, 0x48, 0x8B, 0x05, 0x10, 0x00, 0x00, 0x00};
    const auto insns = linear_sweep(code, 0, code.size(), 64, 0x140001000);
    REQUIRE(insns.size() == 2);
    CHECK(insns[0].text() == "mov rax,rcx");
    REQUIRE(insns[1].memory);
    CHECK(insns[1].memory->rip_relative);
    CHECK(insns[1].memory_target() == 0x140001000 + 10 + 0x10);
}

TEST_CASE("undecodable bytes become db and the sweep continues") {
    const Bytes code{0x0F, 0x0B, 0x90};
    const auto insns = linear_sweep(code, 0, code.size(), 32);
    REQUIRE_FALSE(insns.empty());
    CHECK(insns.front().cls == InsnClass::data);
    CHECK(insns.front().length() == 1);
    CHECK(insns.back().text() == "nop");
    std::size_t total = 0;
    for (const auto& i : insns) total += i.length();
    CHECK(total == code.size());
}

TEST_CASE("a truncated final instruction is emitted as data") {
    const Bytes code{0x90, 0xB8, 0x01, 0x02};
    const auto insns = linear_sweep(code, 0, code.size(), 32);
    REQUIRE(insns.size() >= 2);
    CHECK(insns[0].text() == "nop");
    CHECK(insns[1].cls == InsnClass::data);
    CHECK(insns[1].bytes == Bytes{0xB8});
}

TEST_CASE("API calls through the IAT are annotated and bound") {
    PeSpec spec;
    spec.imports = {{"ADVAPI32.dll", {"RegSetValueExW"}, {}}, {"KERNEL32.dll", {"Sleep"}, {}}};
    SectionSpec text{".text", scn_code, {}, {}, 0};
    text.generate = [](const PeLayout& l) {
        Bytes b;
        for (std::uint8_t v : {6, 5, 4, 3, 2}) {
            b.push_back(0x6A);
            b.push_back(v);
        }
        b.push_back(0x68);
        put32(b, 0x80000001);
        b.push_back(0xFF);
        b.push_back(0x15);
        put32(b, l.iat_va("ADVAPI32.dll", "RegSetValueExW"));
        b.push_back(0x6A);
        b.push_back(1);
        b.push_back(0xFF);
        b.push_back(0x15);
        put32(b, l.iat_va("KERNEL32.dll", "Sleep"));
        b.push_back(0xC3);
        return b;
    };
    spec.sections = {text};
    spec.entry_section = ".text";
    const auto image = build_pe(spec);
    const auto pe = parse_pe(image);
    const auto model = disassemble_pe(image, pe);
    REQUIRE(model.regions.size() == 1);
    std::vector<const Instruction*> calls;
    for (const auto& i : model.regions[0].instructions) {
        if (i.annotation) calls.push_back(&i);
    }
    REQUIRE(calls.size() == 2);
    const auto& reg = *calls[0]->annotation;
    CHECK(reg.library == "ADVAPI32.dll");
    CHECK(reg.api == "RegSetValueExW");
    CHECK(reg.known_signature);
    CHECK_FALSE(reg.partial);
    REQUIRE(reg.bindings.size() == 6);
    CHECK(reg.bindings[0].name == "hKey");
    CHECK(reg.bindings[0].value == 0x80000001u);
    CHECK(reg.bindings[5].value == 6u);
    const auto& sleep = *calls[1]->annotation;
    CHECK(sleep.api == "Sleep");
    REQUIRE(sleep.bindings.size() == 1);
    CHECK(sleep.bindings[0].value == 1u);
}

TEST_CASE("missing pushes mark the binding partial") {
    PeSpec spec;
    spec.imports = {{"ADVAPI32.dll", {"RegSetValueExW"}, {}}};
    SectionSpec text{".text", scn_code, {}, {}, 0};
    text.generate = [](const PeLayout& l) {
        Bytes b{0x6A, 0x01};
        b.push_back(0xFF);
        b.push_back(0x15);
        put32(b, l.iat_va("ADVAPI32.dll", "RegSetValueExW"));
        return b;
    };
    spec.sections = {text};
    spec.entry_section = ".text";
    const auto image = build_pe(spec);
    const auto model = disassemble_pe(image, parse_pe(image));
    const auto& last = model.regions.at(0).instructions.back();
    REQUIRE(last.annotation);
    CHECK(last.annotation->partial);
    CHECK(last.annotation->bindings.size() == 1);
}

TEST_CASE("builtin signature table") {
    const auto table = SignatureTable::builtin();
    CHECK(table.size() > 20);
    REQUIRE(table.find("CreateFileW"));
    CHECK(table.find("CreateFileW")->parameters.size() == 7);
    CHECK(table.find("NoSuchApi") == nullptr);
}

}
