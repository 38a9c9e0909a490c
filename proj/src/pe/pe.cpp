// casefile - offline artifact analysis workbench

#include <casefile/pe/pe.hpp>

#include <casefile/core/unicode.hpp>
#include <casefile/extract/entropy.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

namespace casefile {

namespace {

constexpr std::size_t max_import_libraries = 4096;
constexpr std::size_t max_import_functions = 65536;
constexpr std::size_t max_resources = 16384;
constexpr std::size_t max_name_length = 512;

std::string read_cstring(ByteView data, std::uint64_t offset, std::size_t limit = max_name_length) {
    std::string s;
    for (std::uint64_t i = offset; i < data.size() && s.size() < limit; ++i) {
        if (data[i] == 0) return s;
        s.push_back(static_cast<char>(data[i]));
    }
    if (offset >= data.size()) throw Error(Errc::out_of_bounds, "string offset out of bounds");
    return s;
}

/// UTF-16LE code units until NUL or `end`, as UTF-8.
std::string read_utf16z(ByteView data, std::uint64_t offset, std::uint64_t end, std::size_t* units_read = nullptr) {
    std::u32string out;
    std::uint64_t i = offset;
    std::size_t units = 0;
    end = std::min<std::uint64_t>(end, data.size());
    while (i + 1 < end + 1 && i + 2 <= end) {
        char32_t u = load_le16(data, i);
        i += 2;
        ++units;
        if (u == 0) break;
        if (u >= 0xD800 && u <= 0xDBFF && i + 2 <= end) {
            char32_t lo = load_le16(data, i);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
                u = 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00);
                i += 2;
                ++units;
            }
        }
        out.push_back(is_surrogate(u) ? replacement_char : u);
    }
    if (units_read) *units_read = units;
    return to_utf8(out);
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string hex32(std::uint32_t v, int width = 8) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%0*x", width, v);
    return buf;
}

class Parser {
public:
    explicit Parser(ByteView data) : data_(data) {}

    PeFile run() {
        headers();
        sections();
        auto guarded = [&](const char* what, auto&& fn) {
            try {
                fn();
            } catch (const Error& e) {
                pe_.warnings.push_back(std::string(what) + " skipped: " + e.what());
            }
        };
        guarded("import table", [&] { imports(); });
        guarded("export table", [&] { exports(); });
        guarded("resource tree", [&] { resources(); });
        guarded("version info", [&] { version_info(); });
        guarded("icons", [&] { icons(); });
        guarded("TLS directory", [&] { tls(); });
        guarded("relocations", [&] { relocations(); });
        const auto& sec = pe_.directories[pe_dir::security];
        pe_.signature_present = sec.size != 0 && sec.rva != 0;
        const auto start = pe_.overlay_start();
        if (pe_.file_size > start) pe_.overlay = ByteRange{start, pe_.file_size - start};
        return std::move(pe_);
    }

private:
    [[noreturn]] static void header_oob(const std::string& what) {
        throw Error(Errc::out_of_bounds, "header out of bounds: " + what);
    }

    void headers() {
        pe_.file_size = data_.size();
        if (data_.size() < dos_header_size) throw Error(Errc::bad_format, "file is smaller than a DOS header");
        if (!starts_with(data_, {'M', 'Z'})) throw Error(Errc::bad_format, "missing MZ signature");
        pe_.e_lfanew = load_le32(data_, 0x3C);
        const std::uint64_t nt = pe_.e_lfanew;
        if (!in_bounds(data_, nt, 24)) header_oob("e_lfanew points outside the file");
        if (load_le32(data_, nt) != 0x00004550u) throw Error(Errc::bad_format, "missing PE\\0\\0 signature");
        const auto machine = load_le16(data_, nt + 4);
        if (machine != static_cast<std::uint16_t>(PeMachine::i386) && machine != static_cast<std::uint16_t>(PeMachine::amd64)) {
            throw Error(Errc::unsupported, "unsupported machine 0x" + hex32(machine, 4));
        }
        pe_.machine = static_cast<PeMachine>(machine);
        section_count_ = load_le16(data_, nt + 6);
        pe_.timestamp = load_le32(data_, nt + 8);
        const std::uint16_t opt_size = load_le16(data_, nt + 20);
        pe_.characteristics = load_le16(data_, nt + 22);
        const std::uint64_t opt = nt + 24;
        if (!in_bounds(data_, opt, opt_size) || opt_size < 2) header_oob("optional header");
        const auto magic = load_le16(data_, opt);
        if (magic == 0x10B) pe_.pe32_plus = false;
        else if (magic == 0x20B) pe_.pe32_plus = true;
        else throw Error(Errc::bad_format, "unknown optional header magic 0x" + hex32(magic, 4));
        const std::size_t fixed = pe_.pe32_plus ? 112 : 96;
        if (opt_size < fixed) header_oob("optional header is shorter than its fixed part");
        pe_.entry_point = load_le32(data_, opt + 16);
        pe_.image_base = pe_.pe32_plus ? load_le64(data_, opt + 24) : load_le32(data_, opt + 28);
        pe_.section_alignment = load_le32(data_, opt + 32);
        pe_.file_alignment = load_le32(data_, opt + 36);
        pe_.size_of_image = load_le32(data_, opt + 56);
        pe_.size_of_headers = load_le32(data_, opt + 60);
        pe_.subsystem = load_le16(data_, opt + 68);
        pe_.dll_characteristics = load_le16(data_, opt + 70);
        const std::uint32_t dir_count = load_le32(data_, opt + fixed - 4);
        const std::size_t usable = std::min<std::size_t>({dir_count, pe_dir::count, (opt_size - fixed) / 8});
        for (std::size_t i = 0; i < usable; ++i) {
            pe_.directories[i] = {load_le32(data_, opt + fixed + i * 8), load_le32(data_, opt + fixed + i * 8 + 4)};
        }
        section_table_ = opt + opt_size;
    }

    void sections() {
        if (!in_bounds(data_, section_table_, std::uint64_t{section_count_} * 40)) header_oob("section table");
        for (std::size_t i = 0; i < section_count_; ++i) {
            const std::uint64_t at = section_table_ + i * 40;
            PeSection s;
            auto raw_name = slice(data_, at, 8);
            for (auto c : raw_name) {
                if (c == 0) break;
                s.name.push_back(static_cast<char>(c));
            }
            s.virtual_size = load_le32(data_, at + 8);
            s.virtual_address = load_le32(data_, at + 12);
            s.raw_size = load_le32(data_, at + 16);
            s.raw_offset = load_le32(data_, at + 20);
            s.characteristics = load_le32(data_, at + 36);
            if (s.raw_offset >= data_.size()) {
                if (s.raw_size) pe_.warnings.push_back("section " + s.name + " raw data starts past the end of file");
                s.raw_offset = s.raw_size ? static_cast<std::uint32_t>(data_.size()) : s.raw_offset;
                s.raw_size = 0;
            } else if (s.raw_size > data_.size() - s.raw_offset) {
                pe_.warnings.push_back("section " + s.name + " raw data truncated to the end of file");
                s.raw_size = static_cast<std::uint32_t>(data_.size() - s.raw_offset);
            }
            if (s.raw_size) s.entropy = shannon_entropy(slice(data_, s.raw_range()));
            pe_.sections.push_back(std::move(s));
        }
    }

    std::uint64_t offset_of(std::uint32_t rva, std::uint64_t length = 1) const {
        auto off = pe_.rva_to_offset(rva);
        if (!off || !in_bounds(data_, *off, length)) {
            throw Error(Errc::out_of_bounds, "RVA 0x" + hex32(rva) + " does not map into the file");
        }
        return *off;
    }

    void imports() {
        const auto dir = pe_.directories[pe_dir::imports];
        if (!dir.present()) return;
        const std::size_t thunk = pe_.pe32_plus ? 8 : 4;
        for (std::size_t d = 0; d < max_import_libraries; ++d) {
            const auto at = offset_of(dir.rva + static_cast<std::uint32_t>(d * 20), 20);
            const auto oft = load_le32(data_, at);
            const auto name_rva = load_le32(data_, at + 12);
            const auto ft = load_le32(data_, at + 16);
            if (oft == 0 && name_rva == 0 && ft == 0) return;
            ImportedLibrary lib;
            lib.name = read_cstring(data_, offset_of(name_rva));
            const std::uint32_t lookup = oft ? oft : ft;
            for (std::size_t i = 0; i < max_import_functions; ++i) {
                const auto entry_off = offset_of(lookup + static_cast<std::uint32_t>(i * thunk), thunk);
                const std::uint64_t v = pe_.pe32_plus ? load_le64(data_, entry_off) : load_le32(data_, entry_off);
                if (v == 0) break;
                ImportedFunction f;
                f.iat_rva = ft + static_cast<std::uint32_t>(i * thunk);
                const std::uint64_t ordinal_flag = pe_.pe32_plus ? (1ull << 63) : (1ull << 31);
                if (v & ordinal_flag) {
                    f.ordinal = static_cast<std::uint16_t>(v & 0xFFFF);
                } else {
                    const auto hn = offset_of(static_cast<std::uint32_t>(v & 0x7FFFFFFF), 2);
                    f.hint = load_le16(data_, hn);
                    f.name = read_cstring(data_, hn + 2);
                }
                lib.functions.push_back(std::move(f));
            }
            pe_.imports.push_back(std::move(lib));
        }
    }

    void exports() {
        const auto dir = pe_.directories[pe_dir::exports];
        if (!dir.present()) return;
        const auto at = offset_of(dir.rva, 40);
        ExportTable table;
        table.module_name = read_cstring(data_, offset_of(load_le32(data_, at + 12)));
        const auto base = load_le32(data_, at + 16);
        const auto nfunc = std::min<std::uint32_t>(load_le32(data_, at + 20), max_import_functions);
        const auto nnames = std::min<std::uint32_t>(load_le32(data_, at + 24), max_import_functions);
        const auto funcs = load_le32(data_, at + 28);
        const auto names = load_le32(data_, at + 32);
        const auto ords = load_le32(data_, at + 36);
        std::map<std::uint32_t, std::string> named;
        for (std::uint32_t i = 0; i < nnames; ++i) {
            const auto name_rva = load_le32(data_, offset_of(names + i * 4, 4));
            const auto index = load_le16(data_, offset_of(ords + i * 2, 2));
            named.emplace(index, read_cstring(data_, offset_of(name_rva)));
        }
        for (std::uint32_t i = 0; i < nfunc; ++i) {
            const auto rva = load_le32(data_, offset_of(funcs + i * 4, 4));
            if (rva == 0) continue;
            ExportEntry e;
            e.ordinal = base + i;
            e.rva = rva;
            if (auto it = named.find(i); it != named.end()) e.name = it->second;
            if (rva >= dir.rva && rva < dir.rva + dir.size) e.forwarder = read_cstring(data_, offset_of(rva));
            table.entries.push_back(std::move(e));
        }
        pe_.exports = std::move(table);
    }

    ResourceId resource_id(std::uint64_t root, std::uint32_t name_field) {
        ResourceId id;
        if (name_field & 0x80000000u) {
            const auto at = root + (name_field & 0x7FFFFFFFu);
            const auto len = load_le16(data_, at);
            id.name = read_utf16z(data_, at + 2, at + 2 + std::uint64_t{len} * 2);
        } else {
            id.id = name_field;
        }
        return id;
    }

    void resources() {
        const auto dir = pe_.directories[pe_dir::resources];
        if (!dir.present()) return;
        const auto root = offset_of(dir.rva, 16);
        std::set<std::uint64_t> visited;
        walk_resources(root, root, 0, {}, {}, visited);
    }

    void walk_resources(std::uint64_t root, std::uint64_t at, int level, ResourceId type, ResourceId name,
                        std::set<std::uint64_t>& visited) {
        if (level > 2 || !visited.insert(at).second) throw Error(Errc::bad_format, "resource directory loops");
        const std::size_t count = std::size_t{load_le16(data_, at + 12)} + load_le16(data_, at + 14);
        for (std::size_t i = 0; i < count; ++i) {
            const auto entry = at + 16 + i * 8;
            const auto name_field = load_le32(data_, entry);
            const auto target = load_le32(data_, entry + 4);
            const auto id = resource_id(root, name_field);
            if (target & 0x80000000u) {
                const auto sub = root + (target & 0x7FFFFFFFu);
                if (level == 0) walk_resources(root, sub, 1, id, {}, visited);
                else if (level == 1) walk_resources(root, sub, 2, type, id, visited);
                else throw Error(Errc::bad_format, "resource tree deeper than three levels");
                continue;
            }
            if (pe_.resources.size() >= max_resources) throw Error(Errc::unsupported, "too many resources");
            const auto leaf = root + target;
            ResourceEntry r;
            r.type = level == 0 ? id : type;
            r.name = level == 1 ? id : name;
            r.language = level == 2 ? id.id.value_or(0) : 0;
            r.data_rva = load_le32(data_, leaf);
            const auto size = load_le32(data_, leaf + 4);
            r.codepage = load_le32(data_, leaf + 8);
            r.data = {offset_of(r.data_rva, size), size};
            pe_.resources.push_back(std::move(r));
        }
    }

    struct VsBlock {
        std::string key;
        std::uint16_t value_length = 0;
        std::uint16_t type = 0;
        std::uint64_t value_offset = 0;
        std::uint64_t end = 0;
        std::uint64_t children = 0;
    };

    static std::uint64_t align4(std::uint64_t v) { return (v + 3) & ~std::uint64_t{3}; }

    VsBlock vs_block(std::uint64_t at, std::uint64_t limit) const {
        VsBlock b;
        const auto length = load_le16(data_, at);
        if (length < 6 || at + length > limit) throw Error(Errc::bad_format, "version block length is incoherent");
        b.end = at + length;
        b.value_length = load_le16(data_, at + 2);
        b.type = load_le16(data_, at + 4);
        std::size_t units = 0;
        b.key = read_utf16z(data_, at + 6, b.end, &units);
        b.value_offset = align4(at + 6 + units * 2);
        const std::uint64_t value_bytes = b.type == 1 ? std::uint64_t{b.value_length} * 2 : b.value_length;
        b.children = std::min(align4(b.value_offset + value_bytes), b.end);
        return b;
    }

    template <typename F>
    void vs_children(const VsBlock& parent, F&& fn) const {
        for (auto at = parent.children; at + 6 <= parent.end;) {
            auto child = vs_block(at, parent.end);
            fn(child);
            at = align4(child.end);
        }
    }

    void version_info() {
        for (const auto& r : pe_.resources) {
            if (!r.type.is(rt::version)) continue;
            auto& vi = pe_.version_info;
            const auto root = vs_block(r.data.offset, r.data.end());
            if (root.key != "VS_VERSION_INFO") throw Error(Errc::bad_format, "version resource has key " + root.key);
            if (root.value_length >= 52 && in_bounds(data_, root.value_offset, 52) &&
                load_le32(data_, root.value_offset) == 0xFEEF04BDu) {
                const auto ms = load_le32(data_, root.value_offset + 8);
                const auto ls = load_le32(data_, root.value_offset + 12);
                vi.file_version = std::to_string(ms >> 16) + "." + std::to_string(ms & 0xFFFF) + "." +
                                  std::to_string(ls >> 16) + "." + std::to_string(ls & 0xFFFF);
            }
            vs_children(root, [&](const VsBlock& group) {
                if (group.key == "StringFileInfo") {
                    vs_children(group, [&](const VsBlock& table) {
                        VersionTable t;
                        t.translation = table.key;
                        vs_children(table, [&](const VsBlock& s) {
                            auto value = s.value_length ? read_utf16z(data_, s.value_offset, s.end) : std::string();
                            t.strings.emplace_back(s.key, value);
                            vi.strings.emplace(s.key, value);
                        });
                        vi.tables.push_back(std::move(t));
                    });
                } else if (group.key == "VarFileInfo") {
                    vs_children(group, [&](const VsBlock& var) {
                        if (var.key != "Translation") return;
                        for (std::uint64_t at = var.value_offset; at + 4 <= var.value_offset + var.value_length && at + 4 <= var.end; at += 4) {
                            vi.translations.push_back(load_le32(data_, at));
                        }
                    });
                }
            });
            return; // first version resource only
        }
    }

    void icons() {
        for (const auto& group : pe_.resources) {
            if (!group.type.is(rt::group_icon)) continue;
            const auto dir = slice(data_, group.data);
            const auto count = load_le16(dir, 4);
            for (std::size_t i = 0; i < count; ++i) {
                const auto entry = 6 + i * 14;
                const auto id = load_le16(dir, entry + 12);
                auto it = std::find_if(pe_.resources.begin(), pe_.resources.end(), [&](const ResourceEntry& r) {
                    return r.type.is(rt::icon) && r.name.is(id);
                });
                if (it == pe_.resources.end()) {
                    pe_.warnings.push_back("icon group references missing icon " + std::to_string(id));
                    continue;
                }
                try {
                    pe_.icons.push_back(decode_icon_payload(slice(data_, it->data), it->data));
                } catch (const Error& e) {
                    pe_.warnings.push_back("icon " + std::to_string(id) + " not decoded: " + e.what());
                }
            }
        }
    }

    void tls() {
        const auto dir = pe_.directories[pe_dir::tls];
        if (!dir.present()) return;
        pe_.tls.present = true;
        const auto at = offset_of(dir.rva, pe_.pe32_plus ? 40 : 24);
        pe_.tls.callbacks_va = pe_.pe32_plus ? load_le64(data_, at + 24) : load_le32(data_, at + 12);
        if (pe_.tls.callbacks_va == 0 || pe_.tls.callbacks_va < pe_.image_base) return;
        const auto rva = static_cast<std::uint32_t>(pe_.tls.callbacks_va - pe_.image_base);
        const std::size_t width = pe_.pe32_plus ? 8 : 4;
        for (std::size_t i = 0; i < 256; ++i) {
            const auto off = offset_of(rva + static_cast<std::uint32_t>(i * width), width);
            const std::uint64_t v = pe_.pe32_plus ? load_le64(data_, off) : load_le32(data_, off);
            if (v == 0) break;
            ++pe_.tls.callback_count;
        }
    }

    void relocations() {
        const auto dir = pe_.directories[pe_dir::relocations];
        if (!dir.present()) return;
        auto at = offset_of(dir.rva, dir.size);
        const auto end = at + dir.size;
        while (at + 8 <= end) {
            const auto block = load_le32(data_, at + 4);
            if (block < 8) break;
            ++pe_.relocations.blocks;
            pe_.relocations.entries += (block - 8) / 2;
            at += block;
        }
    }

    ByteView data_;
    PeFile pe_;
    std::uint16_t section_count_ = 0;
    std::uint64_t section_table_ = 0;
};

} // namespace

const char* to_string(PeMachine machine) noexcept {
    return machine == PeMachine::amd64 ? "AMD64" : "I386";
}

std::string ImportedFunction::display() const {
    if (name) return *name;
    return "#" + std::to_string(ordinal.value_or(0));
}

std::string ResourceId::display() const {
    return id ? std::to_string(*id) : name;
}

const PeSection* PeFile::section_for_rva(std::uint32_t rva) const noexcept {
    for (const auto& s : sections) {
        if (rva >= s.virtual_address && rva - s.virtual_address < s.virtual_extent()) return &s;
    }
    return nullptr;
}

std::optional<std::uint64_t> PeFile::rva_to_offset(std::uint32_t rva) const noexcept {
    if (rva < size_of_headers) return rva;
    const auto* s = section_for_rva(rva);
    if (!s) return std::nullopt;
    const std::uint32_t delta = rva - s->virtual_address;
    if (delta >= s->raw_size) return std::nullopt;
    return std::uint64_t{s->raw_offset} + delta;
}

std::optional<std::pair<const ImportedLibrary*, const ImportedFunction*>> PeFile::import_at(std::uint32_t iat_rva) const {
    for (const auto& lib : imports) {
        for (const auto& f : lib.functions) {
            if (f.iat_rva == iat_rva) return std::make_pair(&lib, &f);
        }
    }
    return std::nullopt;
}

std::uint64_t PeFile::overlay_start() const noexcept {
    if (sections.empty()) return std::min<std::uint64_t>(size_of_headers, file_size);
    std::uint64_t end = 0;
    for (const auto& s : sections) {
        if (s.raw_size) end = std::max<std::uint64_t>(end, s.raw_range().end());
    }
    return end ? end : std::min<std::uint64_t>(size_of_headers, file_size);
}

PeFile parse_pe(ByteView data) { return Parser(data).run(); }

bool looks_like_pe(ByteView data) noexcept {
    if (data.size() < dos_header_size || !starts_with(data, {'M', 'Z'})) return false;
    const std::uint64_t nt = static_cast<std::uint32_t>(data[0x3C] | (data[0x3D] << 8) | (data[0x3E] << 16)) |
                             (std::uint64_t{data[0x3F]} << 24);
    return in_bounds(data, nt, 4) && data[nt] == 'P' && data[nt + 1] == 'E' && data[nt + 2] == 0 && data[nt + 3] == 0;
}

std::map<std::string, std::string> pe_version_info(const PeFile& pe) { return pe.version_info.strings; }

std::vector<IconImage> pe_icons(const PeFile& pe) { return pe.icons; }

std::optional<std::string> well_known_vendor(std::string_view company) {
    static const std::vector<std::pair<std::string_view, std::string_view>> vendors{
        {"microsoft", "Microsoft"}, {"google", "Google"},   {"adobe", "Adobe"},   {"apple", "Apple"},
        {"mozilla", "Mozilla"},     {"oracle", "Oracle"},   {"intel", "Intel"},   {"nvidia", "NVIDIA"},
        {"vmware", "VMware"},       {"cisco", "Cisco"},     {"zoom", "Zoom"},     {"dropbox", "Dropbox"},
    };
    const auto c = lower(company);
    for (const auto& [needle, canonical] : vendors) {
        auto pos = c.find(needle);
        if (pos == std::string::npos) continue;
        const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(c[pos - 1]));
        const auto after = pos + needle.size();
        const bool right = after == c.size() || !std::isalnum(static_cast<unsigned char>(c[after]));
        if (left && right) return std::string(canonical);
    }
    return std::nullopt;
}

std::vector<SecurityHint> pe_hints(const PeFile& pe) {
    std::vector<SecurityHint> hints;
    static const std::set<std::string> sfx_names{"sfxzip.exe"};
    if (pe.exports && sfx_names.count(lower(pe.exports->module_name))) {
        hints.push_back({Severity::suspicious,
                         "self-extract archive stub: export module name is " + pe.exports->module_name, 0});
    }
    std::optional<std::string> vendor;
    if (auto it = pe.version_info.strings.find("CompanyName"); it != pe.version_info.strings.end()) {
        vendor = well_known_vendor(it->second);
    }
    if (vendor && !pe.signature_present) {
        hints.push_back({Severity::suspicious, "unsigned binary claims " + *vendor + " as its company", 0});
        if (!pe.icons.empty()) {
            hints.push_back({Severity::suspicious,
                             "icon lure: unsigned binary carries an icon while impersonating " + *vendor, 0});
        }
    }
    for (const auto& s : pe.sections) {
        if (s.raw_size && s.entropy >= packed_entropy_threshold) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", s.entropy);
            hints.push_back({Severity::suspicious,
                             "possibly packed: section " + s.name + " has entropy " + buf + " bits/byte", 0});
        }
    }
    for (const auto& w : pe.warnings) hints.push_back({Severity::info, w, 0});
    return hints;
}

} // namespace casefile
