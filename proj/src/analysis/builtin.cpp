// casefile - offline artifact analysis workbench
// Built-in identifiers: probes, parsers, viewer plans.

#include <casefile/analysis/builtin.hpp>

#include <casefile/core/error.hpp>
#include <casefile/core/unicode.hpp>
#include <casefile/disasm/x86.hpp>
#include <casefile/pe/pe.hpp>
#include <casefile/text/text_type.hpp>
#include <casefile/zip/zip.hpp>

#include <json.hpp>

#include <cstdio>

namespace casefile {

namespace {

std::optional<TypeIdentification> magic(bool hit) {
    if (!hit) return std::nullopt;
    return TypeIdentification{"", IdentMethod::magic};
}

bool looks_like_pcap(ByteView d) {
    if (d.size() < 4) return false;
    const auto m = load_be32(d, 0);
    return m == 0xA1B2C3D4u || m == 0xD4C3B2A1u || m == 0xA1B23C4Du || m == 0x4D3CB2A1u || m == 0x0A0D0D0Au;
}

bool looks_like_bmp(ByteView d) {
    if (d.size() < 26 || !starts_with(d, {'B', 'M'})) return false;
    switch (load_le32(d, 14)) {
    case 12: case 40: case 52: case 56: case 64: case 108: case 124: return true;
    default: return false;
    }
}

bool looks_like_ico(ByteView d) {
    if (d.size() < 22 || load_le16(d, 0) != 0) return false;
    const auto type = load_le16(d, 2);
    const auto count = load_le16(d, 4);
    if ((type != 1 && type != 2) || count == 0 || 6u + 16u * count > d.size()) return false;
    const auto size = load_le32(d, 14);
    const auto offset = load_le32(d, 18);
    return d[9] == 0 && size > 0 && in_bounds(d, offset, size);
}

std::optional<TypeIdentification> text_probe(ByteView data, std::string_view name, std::string_view tag) {
    const auto cls = classify_content(data);
    if (!cls.is_text()) return std::nullopt;
    auto id = detect_text_type(to_utf8(decode_text(data, cls).code_points), name);
    if (id.tag != tag) return std::nullopt;
    return id;
}

CanonicalText text_of(ByteView data) {
    auto cls = classify_content(data);
    if (!cls.is_text()) cls = ContentClass{ContentKind::text, TextEncoding::ascii, false};
    return decode_text(data, cls);
}

ParseOutcome script_outcome(ByteView data) {
    ScriptModel m;
    m.text = text_of(data);
    m.tokens = tokenize_js(m.text);
    ParseOutcome out;
    out.model = make_model(std::move(m));
    return out;
}

ViewerPlan lexical_plan(const std::any&, ByteView) {
    return make_plan({ViewerKind::lexical, ViewerKind::text, ViewerKind::buffer});
}

std::string basename_of(std::string_view path) {
    auto q = path.find_first_of("?#");
    if (q != std::string_view::npos) path = path.substr(0, q);
    auto slash = path.find_last_of("/\\");
    if (slash != std::string_view::npos) path.remove_prefix(slash + 1);
    return std::string(path);
}

std::string hex_u64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    return buf;
}

IdentifierDescriptor pe_identifier() {
    IdentifierDescriptor d;
    d.tag = tags::pe;
    d.description = "Windows Portable Executable";
    d.probe = [](ByteView data, std::string_view) { return magic(looks_like_pe(data)); };
    d.parse = [](ByteView data) {
        auto pe = parse_pe(data);
        ParseOutcome out;
        out.hints = pe_hints(pe);
        out.model = make_model(std::move(pe));
        return out;
    };
    d.viewer_plan = [](const std::any& model, ByteView data) {
        const auto* pe = model_cast<PeFile>(model);
        const bool zip_overlay = pe && pe->overlay && looks_like_zip(slice(data, *pe->overlay));
        auto plan = zip_overlay ? make_plan({ViewerKind::buffer, ViewerKind::disasm, ViewerKind::container}, 2)
                                : make_plan({ViewerKind::buffer, ViewerKind::disasm});
        if (pe) {
            auto& zones = plan[0].config.zones;
            zones.push_back({{0, std::min<std::uint64_t>(pe->size_of_headers, data.size())}, "PE headers",
                             "zone.header"});
            for (const auto& s : pe->sections) {
                const auto r = s.raw_range();
                if (!r.empty() && r.within(data.size())) zones.push_back({r, "section " + s.name, "zone.section"});
            }
            if (pe->overlay) zones.push_back({*pe->overlay, "overlay", "zone.overlay"});
            if (zip_overlay) plan[2].config.note = "ZIP archive in overlay";
        }
        return plan;
    };
    return d;
}

IdentifierDescriptor zip_identifier() {
    IdentifierDescriptor d;
    d.tag = tags::zip;
    d.description = "ZIP archive";
    d.probe = [](ByteView data, std::string_view) { return magic(looks_like_zip(data)); };
    d.parse = [](ByteView data) {
        auto a = parse_zip(data);
        ParseOutcome out;
        out.hints = zip_hints(a);
        out.model = make_model(std::move(a));
        return out;
    };
    d.viewer_plan = [](const std::any&, ByteView) { return make_plan({ViewerKind::container, ViewerKind::buffer}); };
    return d;
}

IdentifierDescriptor pcap_identifier() {
    IdentifierDescriptor d;
    d.tag = tags::pcap;
    d.description = "packet capture";
    d.probe = [](ByteView data, std::string_view) { return magic(looks_like_pcap(data)); };
    d.parse = [](ByteView data) {
        auto m = analyze_capture(data);
        ParseOutcome out;
        out.hints = pcap_hints(m.capture, m.streams);
        out.model = make_model(std::move(m));
        return out;
    };
    d.viewer_plan = [](const std::any&, ByteView) { return make_plan({ViewerKind::container, ViewerKind::buffer}); };
    return d;
}

IdentifierDescriptor bmp_identifier() {
    IdentifierDescriptor d;
    d.tag = tags::bmp;
    d.description = "bitmap image";
    d.probe = [](ByteView data, std::string_view) { return magic(looks_like_bmp(data)); };
    d.parse = [](ByteView data) {
        ParseOutcome out;
        out.model = make_model(parse_bmp(data));
        return out;
    };
    d.viewer_plan = [](const std::any&, ByteView) { return make_plan({ViewerKind::image, ViewerKind::buffer}); };
    return d;
}

IdentifierDescriptor ico_identifier() {
    IdentifierDescriptor d;
    d.tag = tags::ico;
    d.description = "icon / cursor";
    d.probe = [](ByteView data, std::string_view) { return magic(looks_like_ico(data)); };
    d.parse = [](ByteView data) {
        ParseOutcome out;
        out.model = make_model(IconSet(parse_ico(data)));
        return out;
    };
    d.viewer_plan = [](const std::any&, ByteView) { return make_plan({ViewerKind::image, ViewerKind::buffer}); };
    return d;
}

IdentifierDescriptor text_identifier(std::string_view tag, std::string description,
                                     std::function<ParseOutcome(ByteView)> parse,
                                     std::function<ViewerPlan(const std::any&, ByteView)> plan) {
    IdentifierDescriptor d;
    d.tag = tag;
    d.description = std::move(description);
    d.probe = [tag](ByteView data, std::string_view name) { return text_probe(data, name, tag); };
    d.parse = std::move(parse);
    d.viewer_plan = std::move(plan);
    return d;
}

} // namespace

std::string buffer_text(ByteView data) { return to_utf8(text_of(data).code_points); }

TableModel parse_table(std::string_view text, char delimiter) {
    TableModel t;
    t.delimiter = delimiter;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
            continue;
        }
        any = true;
        if (c == '"' && cell.empty()) {
            quoted = true;
        } else if (c == delimiter) {
            row.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            row.push_back(std::move(cell));
            cell.clear();
            t.rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            cell.push_back(c);
        }
    }
    if (any || !cell.empty() || !row.empty()) {
        row.push_back(std::move(cell));
        t.rows.push_back(std::move(row));
    }
    return t;
}

IdentifierRegistry builtin_registry() {
    IdentifierRegistry r;
    r.add(pe_identifier());
    r.add(zip_identifier());
    r.add(pcap_identifier());
    r.add(bmp_identifier());
    r.add(ico_identifier());
    r.add(text_identifier(
        tags::json, "JSON document",
        [](ByteView data) {
            auto out = script_outcome(data);
            if (!nlohmann::json::accept(to_utf8(model_cast<ScriptModel>(out.model)->text.code_points))) {
                throw Error(Errc::bad_format, "not valid JSON");
            }
            return out;
        },
        lexical_plan));
    r.add(text_identifier(tags::ini, "INI configuration", script_outcome, lexical_plan));
    r.add(text_identifier(
        tags::csv, "delimited table",
        [](ByteView data) {
            const auto text = buffer_text(data);
            auto delim = csv_delimiter(text);
            ParseOutcome out;
            out.model = make_model(parse_table(text, delim.value_or(',')));
            return out;
        },
        [](const std::any&, ByteView) { return make_plan({ViewerKind::table, ViewerKind::text, ViewerKind::buffer}); }));
    r.add(text_identifier(
        tags::js, "JavaScript source",
        [](ByteView data) {
            auto out = script_outcome(data);
            const auto* m = model_cast<ScriptModel>(out.model);
            const auto result = deobfuscate_fixpoint(m->tokens);
            if (!result.log.steps.empty()) {
                std::string passes;
                for (const auto& name : deobfuscation_passes()) {
                    if (!result.log.fired(name)) continue;
                    if (!passes.empty()) passes += ", ";
                    passes += name;
                }
                out.hints.push_back({Severity::suspicious, "script appears obfuscated; passes that changed it: " + passes, 0});
            }
            return out;
        },
        lexical_plan));
    return r;
}

DeobfuscationResult deobfuscate_text(ByteView data, std::size_t max_iterations) {
    return deobfuscate_fixpoint(tokenize_js(text_of(data)), max_iterations);
}

const ArtifactNode& pe_overlay_node(AnalysisSession& session, NodeId pe_node) {
    const auto& n = session.node(pe_node);
    const auto* pe = n.model_as<PeFile>();
    if (!pe) throw Error(Errc::invalid_argument, "node " + std::to_string(pe_node) + " is not a parsed PE");
    if (!pe->overlay) throw Error(Errc::not_found, "PE has no overlay");
    return session.derive(pe_node, n.buffer.name + ".overlay", Derivation::slice(*pe->overlay, "overlay extraction"));
}

const ArtifactNode& export_body(AnalysisSession& session, NodeId pcap_node, const StreamKey& key,
                                std::size_t transaction_index) {
    const auto& n = session.node(pcap_node);
    const auto* cap = n.model_as<CaptureModel>();
    if (!cap) throw Error(Errc::invalid_argument, "node " + std::to_string(pcap_node) + " is not a parsed capture");
    std::size_t s = 0;
    while (s < cap->streams.size() && !(cap->streams[s].key == key)) ++s;
    if (s == cap->streams.size()) throw Error(Errc::not_found, "no stream " + key.to_string());
    const auto& txns = cap->transactions[s];
    if (transaction_index >= txns.size()) {
        throw Error(Errc::not_found, "stream " + key.to_string() + " has no transaction " +
                                         std::to_string(transaction_index));
    }
    const auto& t = txns[transaction_index];
    if (!t.has_response) throw Error(Errc::not_found, "transaction " + t.label() + " has no response");

    Derivation d;
    d.label = "HTTP body " + t.label();
    d.replay = [key, transaction_index](ByteView parent) {
        const auto m = analyze_capture(parent);
        const auto* stream = m.find(key);
        if (!stream) throw Error(Errc::not_found, "no stream " + key.to_string());
        auto txns = http_transactions(*stream);
        if (transaction_index >= txns.size()) throw Error(Errc::not_found, "transaction vanished on replay");
        return std::move(txns[transaction_index].body_decoded);
    };
    auto name = basename_of(t.target);
    if (name.empty()) name = "body-" + std::to_string(transaction_index);
    return session.derive(pcap_node, name, std::move(d));
}

const ArtifactNode& zip_entry_node(AnalysisSession& session, NodeId zip_node, std::size_t entry_index,
                                   const std::optional<std::string>& password) {
    const auto& n = session.node(zip_node);
    const auto* zip = n.model_as<ZipArchive>();
    if (!zip) throw Error(Errc::invalid_argument, "node " + std::to_string(zip_node) + " is not a parsed ZIP");
    if (entry_index >= zip->entries.size()) throw Error(Errc::not_found, "no entry " + std::to_string(entry_index));
    // extract once up front so failures surface before a node exists
    zip_extract(n.buffer.bytes(), *zip, entry_index, password);
    const auto& entry = zip->entries[entry_index];
    Derivation d;
    d.label = "zip entry " + entry.name;
    d.replay = [entry_index, password](ByteView parent) {
        return zip_extract(parent, parse_zip(parent), entry_index, password);
    };
    return session.derive(zip_node, basename_of(entry.name), std::move(d));
}

const ArtifactNode& deobfuscated_node(AnalysisSession& session, NodeId js_node, TransformLog* log) {
    const auto& n = session.node(js_node);
    if (log) *log = deobfuscate_text(n.buffer.bytes()).log;
    Derivation d;
    d.label = "deobfuscation";
    d.replay = [](ByteView parent) { return to_bytes(to_utf8(deobfuscate_text(parent).text())); };
    auto name = n.buffer.name;
    const auto dot = name.rfind('.');
    name = (dot == std::string::npos ? name : name.substr(0, dot)) + ".deobf.js";
    return session.derive(js_node, name, std::move(d));
}

std::vector<ApiBuffer> api_buffers(ByteView data) {
    const auto pe = parse_pe(data);
    const auto model = disassemble_pe(data, pe);
    std::vector<ApiBuffer> out;
    for (const auto& region : model.regions) {
        for (const auto& insn : region.instructions) {
            if (!insn.annotation || !insn.annotation->known_signature) continue;
            const auto& a = *insn.annotation;
            std::size_t ptr = 0, len = 0;
            if (a.api == "WriteFile") {
                ptr = 1, len = 2;
            } else if (a.api == "RegSetValueExW" || a.api == "RegSetValueExA") {
                ptr = 4, len = 5;
            } else {
                continue;
            }
            if (a.bindings.size() <= std::max(ptr, len)) continue;
            const auto& p = a.bindings[ptr].value;
            const auto& l = a.bindings[len].value;
            if (!p || !l || *l == 0 || *p < pe.image_base || *p - pe.image_base > 0xFFFFFFFFu) continue;
            const auto off = pe.rva_to_offset(static_cast<std::uint32_t>(*p - pe.image_base));
            if (!off) continue;
            ApiBuffer b{a.api, *p, {*off, *l}};
            if (!b.range.within(data.size())) continue;
            bool seen = false;
            for (const auto& o : out) seen |= o.range == b.range;
            if (!seen) out.push_back(std::move(b));
        }
    }
    return out;
}

const ArtifactNode& api_buffer_node(AnalysisSession& session, NodeId pe_node, const ApiBuffer& buffer) {
    const auto& n = session.node(pe_node);
    return session.derive(pe_node, n.buffer.name + "@" + hex_u64(buffer.address),
                          Derivation::slice(buffer.range, buffer.api + " buffer " + to_string(buffer.range)));
}

} // namespace casefile
