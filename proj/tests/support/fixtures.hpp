// casefile - offline artifact analysis workbench
// Fixture writers used by the tests: PE, ZIP, PCAP, BMP/ICO and the scenario capture.

#pragma once

#include <casefile/core/bytes.hpp>
#include <casefile/media/image.hpp>

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace casefile::fixtures {

// ---- PE ----

struct PeLayout {
    std::uint64_t image_base = 0;
    std::map<std::string, std::uint32_t> section_rva;
    std::map<std::string, std::uint32_t> iat_rva; ///< key "library!function"

    std::uint64_t va(const std::string& section, std::uint32_t offset = 0) const {
        return image_base + section_rva.at(section) + offset;
    }
    std::uint64_t iat_va(const std::string& library, const std::string& function) const {
        return image_base + iat_rva.at(library + "!" + function);
    }
};

struct SectionSpec {
    std::string name;
    std::uint32_t characteristics = 0x60000020; ///< code | execute | read
    Bytes data;
    /// Called once all earlier sections and the IAT are placed; overrides `data`.
    std::function<Bytes(const PeLayout&)> generate;
    std::uint32_t extra_virtual = 0; ///< VirtualSize beyond the data
};

inline constexpr std::uint32_t scn_code = 0x60000020;
inline constexpr std::uint32_t scn_data = 0xC0000040;
inline constexpr std::uint32_t scn_rdata = 0x40000040;

struct ImportSpec {
    std::string library;
    std::vector<std::string> functions;
    std::vector<std::uint16_t> ordinals;
};

struct ExportSpec {
    std::string module_name;
    std::vector<std::string> names; ///< each exported at a distinct small RVA
};

struct PeSpec {
    unsigned bitness = 32;
    std::uint64_t image_base = 0x400000;
    std::uint32_t timestamp = 0x5F000000;
    std::uint16_t subsystem = 2;
    std::vector<SectionSpec> sections; ///< laid out after the generated .idata
    std::vector<ImportSpec> imports;
    std::optional<ExportSpec> exports;
    std::vector<std::pair<std::string, std::string>> version_strings; ///< in table order
    std::optional<Bytes> icon_dib; ///< RT_ICON payload (DIB with AND mask)
    Bytes overlay;
    bool signature = false; ///< security directory pointing into the overlay
    std::string entry_section;
    std::uint32_t entry_offset = 0;
};

Bytes build_pe(const PeSpec& spec);

/// 16x16 4bpp icon DIB; `pixel(x, y)` returns a 0..15 palette index.
Bytes icon_dib_4bpp(const std::function<std::uint8_t(unsigned, unsigned)>& pixel);

// ---- ZIP ----

struct ZipSpecEntry {
    std::string name;
    Bytes data;
    bool deflate = false;
    std::optional<std::string> password; ///< ZipCrypto
    bool data_descriptor = false;         ///< flag bit 3
    std::uint16_t mod_time = 0x6000;
    std::uint16_t mod_date = 0x5021;
};

/// `header_seed` feeds the 12-byte encryption header.
Bytes build_zip(const std::vector<ZipSpecEntry>& entries, std::uint32_t header_seed = 1);

// ---- PCAP ----

struct Segment {
    bool from_client = true;
    std::uint32_t seq_offset = 0; ///< relative to the direction's ISN + 1
    Bytes payload;
    std::uint8_t flags = 0x18;    ///< PSH|ACK
};

struct Conversation {
    std::uint32_t client_ip = 0x0A000002;
    std::uint16_t client_port = 49152;
    std::uint32_t server_ip = 0x5DB8D822;
    std::uint16_t server_port = 80;
    std::uint32_t client_isn = 1000;
    std::uint32_t server_isn = 5000;
};

/// Ethernet/IPv4/TCP frame for one segment of `c`.
Bytes tcp_frame(const Conversation& c, bool from_client, std::uint32_t seq, std::uint32_t ack, std::uint8_t flags,
                ByteView payload);

/// Handshake, the given segments (in the given order), then FINs.
std::vector<Bytes> conversation_frames(const Conversation& c, const std::vector<Segment>& segments);

/// Splits a payload into segments of the given sizes (the last takes the rest).
std::vector<Segment> split_payload(bool from_client, ByteView payload, const std::vector<std::size_t>& sizes,
                                   std::uint32_t base = 0);

Bytes build_pcap(const std::vector<Bytes>& frames, bool swapped = false, bool nanosecond = false);

/// Simple HTTP/1.1 exchange: GET target, 200 response with the body.
std::pair<Bytes, Bytes> http_exchange(const std::string& host, const std::string& target,
                                      const std::string& content_type, ByteView body);

// ---- images ----

Bytes build_bmp24(const ImageModel& image, bool top_down = false);
Bytes build_ico(const std::vector<Bytes>& dib_payloads, const std::vector<std::pair<unsigned, unsigned>>& sizes);

/// Renders digits and '-' with a 3x5 block font, scaled, black on white.
ImageModel render_text_image(const std::string& text, unsigned scale = 4);

// ---- scenario ----

struct Scenario {
    Bytes pcap;
    std::string password;
    std::string script_name = "analytics.js";
    std::string image_name = "image.bmp";
    std::string installer_name = "safe_mozilla_installer.exe";
    std::string payload_name = "safe_mozila.exe";
    Bytes script;      ///< obfuscated JS as served
    Bytes image;       ///< BMP as served
    Bytes installer;   ///< PE with the ZIP overlay
    Bytes payload;     ///< inner PE
    std::string note;  ///< ASCII-art ransom note written by the payload
    /// Seeded artifact values by kind name ("url", "ip", ...).
    std::map<std::string, std::string> seeded;
};

Scenario build_scenario();

/// Obfuscated JS with comment noise, escapes, concatenation (and reversal when asked).
std::string obfuscate_js(const std::string& plain, std::mt19937& rng, bool reverse_strings);

} // namespace casefile::fixtures
