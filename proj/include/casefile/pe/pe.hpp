// casefile - offline artifact analysis workbench
// Portable Executable model: headers, sections, directories, imports,
// exports, resources, version info, icons, overlay and signature presence.

#pragma once

#include <casefile/core/bytes.hpp>
#include <casefile/engine/identification.hpp>
#include <casefile/media/image.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace casefile {

enum class PeMachine : std::uint16_t { i386 = 0x14c, amd64 = 0x8664 };

const char* to_string(PeMachine machine) noexcept;

namespace pe_dir {
inline constexpr std::size_t exports = 0;
inline constexpr std::size_t imports = 1;
inline constexpr std::size_t resources = 2;
inline constexpr std::size_t exceptions = 3;
inline constexpr std::size_t security = 4;
inline constexpr std::size_t relocations = 5;
inline constexpr std::size_t debug = 6;
inline constexpr std::size_t tls = 9;
inline constexpr std::size_t iat = 12;
inline constexpr std::size_t count = 16;
} // namespace pe_dir

namespace rt {
inline constexpr std::uint32_t icon = 3;
inline constexpr std::uint32_t group_icon = 14;
inline constexpr std::uint32_t version = 16;
} // namespace rt

struct PeSection {
    std::string name;
    std::uint32_t virtual_address = 0;
    std::uint32_t virtual_size = 0;
    std::uint32_t raw_offset = 0;
    std::uint32_t raw_size = 0; ///< clamped to the file
    std::uint32_t characteristics = 0;
    double entropy = 0.0;

    ByteRange raw_range() const noexcept { return {raw_offset, raw_size}; }
    std::uint32_t virtual_extent() const noexcept { return std::max(virtual_size, raw_size); }
    bool executable() const noexcept { return (characteristics & 0x20000000u) || (characteristics & 0x20u); }
};

struct DataDirectory {
    std::uint32_t rva = 0;
    std::uint32_t size = 0;

    bool present() const noexcept { return rva != 0 && size != 0; }
    friend bool operator==(const DataDirectory&, const DataDirectory&) = default;
};

struct ImportedFunction {
    std::optional<std::string> name;
    std::optional<std::uint16_t> ordinal;
    std::uint16_t hint = 0;
    std::uint32_t iat_rva = 0;

    std::string display() const; ///< name or "#ordinal"
};

struct ImportedLibrary {
    std::string name;
    std::vector<ImportedFunction> functions;
};

struct ExportEntry {
    std::optional<std::string> name;
    std::uint32_t ordinal = 0;
    std::uint32_t rva = 0;
    std::optional<std::string> forwarder;
};

struct ExportTable {
    std::string module_name;
    std::vector<ExportEntry> entries;
};

struct ResourceId {
    std::optional<std::uint32_t> id;
    std::string name;

    std::string display() const;
    bool is(std::uint32_t v) const noexcept { return id && *id == v; }
};

struct ResourceEntry {
    ResourceId type;
    ResourceId name;
    std::uint32_t language = 0;
    std::uint32_t data_rva = 0;
    std::uint32_t codepage = 0;
    ByteRange data; ///< file range of the payload
};

struct VersionTable {
    std::string translation; ///< e.g. "040904b0"
    std::vector<std::pair<std::string, std::string>> strings;
};

struct VersionInfo {
    std::map<std::string, std::string> strings; ///< merged, first-seen key wins
    std::vector<VersionTable> tables;            ///< raw per-translation tables
    std::vector<std::uint32_t> translations;     ///< VarFileInfo\Translation values
    std::optional<std::string> file_version;     ///< from the fixed file info

    bool empty() const noexcept { return strings.empty() && tables.empty() && !file_version; }
};

struct TlsSummary {
    bool present = false;
    std::uint64_t callbacks_va = 0;
    std::size_t callback_count = 0;
};

struct RelocationSummary {
    std::size_t blocks = 0;
    std::size_t entries = 0;
};

struct PeFile {
    PeMachine machine = PeMachine::i386;
    std::uint16_t characteristics = 0;
    std::uint32_t timestamp = 0;
    bool pe32_plus = false;
    std::uint32_t e_lfanew = 0;
    std::uint32_t entry_point = 0;
    std::uint64_t image_base = 0;
    std::uint32_t section_alignment = 0;
    std::uint32_t file_alignment = 0;
    std::uint32_t size_of_image = 0;
    std::uint32_t size_of_headers = 0;
    std::uint16_t subsystem = 0;
    std::uint16_t dll_characteristics = 0;
    std::vector<PeSection> sections;
    std::array<DataDirectory, pe_dir::count> directories{};
    std::vector<ImportedLibrary> imports;
    std::optional<ExportTable> exports;
    std::vector<ResourceEntry> resources;
    VersionInfo version_info;
    std::vector<IconImage> icons;
    std::optional<ByteRange> overlay;
    bool signature_present = false;
    TlsSummary tls;
    RelocationSummary relocations;
    std::uint64_t file_size = 0;
    std::vector<std::string> warnings; ///< optional structures that were skipped

    unsigned bitness() const noexcept { return pe32_plus ? 64 : 32; }
    std::optional<std::uint64_t> rva_to_offset(std::uint32_t rva) const noexcept;
    const PeSection* section_for_rva(std::uint32_t rva) const noexcept;
    /// Import owning an IAT slot, if any.
    std::optional<std::pair<const ImportedLibrary*, const ImportedFunction*>> import_at(std::uint32_t iat_rva) const;
    std::uint64_t overlay_start() const noexcept;
};

inline constexpr std::size_t dos_header_size = 64;

/// Throws bad_format / out_of_bounds / unsupported for fatal header problems;
/// damaged optional structures land in `warnings` instead.
PeFile parse_pe(ByteView data);

/// Cheap structural check used by the identifier probe.
bool looks_like_pe(ByteView data) noexcept;

std::map<std::string, std::string> pe_version_info(const PeFile& pe);
std::vector<IconImage> pe_icons(const PeFile& pe);

/// Canonical vendor name if the company string claims a well-known vendor.
std::optional<std::string> well_known_vendor(std::string_view company);

std::vector<SecurityHint> pe_hints(const PeFile& pe);

} // namespace casefile
