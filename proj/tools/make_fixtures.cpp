// casefile - offline artifact analysis workbench
// Writes the generated test corpora that external oracles consume.

#include "corpus.hpp"
#include "fixtures.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace casefile;

namespace {

constexpr std::size_t disasm_files_per_mode = 10;
constexpr std::size_t disasm_instructions = 400;
constexpr std::size_t literal_statements = 500;

void write_scenario(const fs::path& dir) {
    fs::create_directories(dir);
    const auto s = fixtures::build_scenario();
    write_file((dir / "capture.pcap").string(), s.pcap);
    nlohmann::ordered_json j;
    j["password"] = s.password;
    j["script"] = s.script_name;
    j["image"] = s.image_name;
    j["installer"] = s.installer_name;
    j["payload"] = s.payload_name;
    j["seeded"] = s.seeded;
    std::ofstream(dir / "scenario.json") << j.dump(2) << "\n";
}

void write_disasm(const fs::path& dir) {
    fs::create_directories(dir);
    corpus::Rng rng(0xD15A5);
    for (unsigned bits : {32u, 64u}) {
        for (std::size_t i = 0; i < disasm_files_per_mode; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "x%u-%02zu.bin", bits, i);
            write_file((dir / name).string(), corpus::random_x86(rng, bits, disasm_instructions));
        }
    }
}

void write_literals(const fs::path& dir) {
    fs::create_directories(dir);
    corpus::Rng rng(0x11737);
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < literal_statements; ++i) list.push_back(corpus::random_literal_statement(rng));
    std::ofstream(dir / "literals.json") << list.dump(1) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: casefile_fixtures OUTPUT_DIR\n";
        return 1;
    }
    const fs::path out = argv[1];
    try {
        write_scenario(out / "scenario");
        write_disasm(out / "disasm");
        write_literals(out / "js");
    } catch (const std::exception& e) {
        std::cerr << "casefile_fixtures: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
