// casefile - offline artifact analysis workbench

#include <casefile/analysis/report.hpp>

#include <casefile/core/error.hpp>
#include <casefile/extract/artifacts.hpp>
#include <casefile/extract/digest.hpp>
#include <casefile/extract/entropy.hpp>
#include <casefile/extract/strings.hpp>
#include <casefile/pe/pe.hpp>
#include <casefile/zip/zip.hpp>

#include <json.hpp>

#include <deque>

namespace casefile {

using nlohmann::ordered_json;

namespace {

std::size_t derived_count(const AnalysisSession& s) {
    std::size_t n = 0;
    for (auto id : s.depth_first()) n += s.node(id).parent.has_value();
    return n;
}

void expand_one(AnalysisRun& run, NodeId id, const AnalyzeOptions& options) {
    auto& session = run.session;
    const auto& node = session.node(id);
    const auto tag = node.tag();

    auto attempt = [&](const std::string& what, auto&& action) {
        if (derived_count(session) >= session.settings().max_derived_nodes) {
            if (!run.limit_reached) run.warnings.push_back("derived node limit reached; expansion stopped");
            run.limit_reached = true;
            return;
        }
        try {
            action();
        } catch (const Error& e) {
            run.warnings.push_back("node " + std::to_string(id) + ": " + what + ": " + e.what());
        }
    };

    if (tag == tags::pcap) {
        const auto* cap = node.model_as<CaptureModel>();
        for (std::size_t s = 0; cap && s < cap->streams.size(); ++s) {
            for (std::size_t t = 0; t < cap->transactions[s].size(); ++t) {
                const auto& txn = cap->transactions[s][t];
                if (!txn.has_response || txn.body_decoded.empty()) continue;
                attempt("export " + txn.label(), [&] { export_body(session, id, cap->streams[s].key, t); });
            }
        }
    } else if (tag == tags::pe) {
        const auto* pe = node.model_as<PeFile>();
        if (pe && pe->overlay && !pe->overlay->empty()) {
            attempt("overlay extraction", [&] { pe_overlay_node(session, id); });
        }
        std::vector<ApiBuffer> buffers;
        try {
            buffers = api_buffers(node.buffer.bytes());
        } catch (const Error& e) {
            run.warnings.push_back("node " + std::to_string(id) + ": disassembly: " + e.what());
        }
        for (const auto& b : buffers) attempt(b.api + " buffer", [&] { api_buffer_node(session, id, b); });
    } else if (tag == tags::zip) {
        const auto* zip = node.model_as<ZipArchive>();
        for (std::size_t i = 0; zip && i < zip->entries.size(); ++i) {
            const auto& e = zip->entries[i];
            if (e.directory()) continue;
            if (!e.encrypted()) {
                attempt("zip entry " + e.name, [&] { zip_entry_node(session, id, i); });
                continue;
            }
            bool opened = false;
            for (const auto& pw : options.passwords) {
                try {
                    zip_entry_node(session, id, i, pw);
                    opened = true;
                    break;
                } catch (const Error& err) {
                    if (err.code() != Errc::wrong_password) {
                        run.warnings.push_back("node " + std::to_string(id) + ": zip entry " + e.name + ": " +
                                               err.what());
                        opened = true; // not a password problem; do not report it as one
                        break;
                    }
                }
            }
            if (!opened) {
                const auto text = options.passwords.empty()
                                      ? "entry " + e.name + " is encrypted and no password was supplied"
                                      : "entry " + e.name + " could not be opened with any supplied password";
                session.add_hint(id, {Severity::suspicious, text, id});
                run.warnings.push_back("node " + std::to_string(id) + ": " + text);
            }
        }
    } else if (tag == tags::js) {
        TransformLog log;
        try {
            log = deobfuscate_text(node.buffer.bytes()).log;
        } catch (const Error& e) {
            run.warnings.push_back("node " + std::to_string(id) + ": deobfuscation: " + e.what());
            return;
        }
        const bool changed = !log.steps.empty();
        run.deobfuscation[id] = std::move(log);
        if (changed && node.action_label != "deobfuscation") {
            attempt("deobfuscation", [&] { deobfuscated_node(session, id); });
        }
    }
}

ordered_json hints_json(const std::vector<SecurityHint>& hints) {
    auto arr = ordered_json::array();
    for (const auto& h : hints) arr.push_back({{"severity", to_string(h.severity)}, {"text", h.text}});
    return arr;
}

ordered_json pe_json(const PeFile& pe) {
    ordered_json j;
    j["machine"] = pe.machine == PeMachine::amd64 ? "AMD64" : "I386";
    j["bitness"] = pe.bitness();
    j["entry_point"] = pe.entry_point;
    j["image_base"] = pe.image_base;
    j["subsystem"] = pe.subsystem;
    auto sections = ordered_json::array();
    for (const auto& s : pe.sections) {
        sections.push_back({{"name", s.name},
                            {"virtual_address", s.virtual_address},
                            {"virtual_size", s.virtual_size},
                            {"raw_offset", s.raw_offset},
                            {"raw_size", s.raw_size},
                            {"characteristics", s.characteristics},
                            {"entropy", s.entropy}});
    }
    j["sections"] = std::move(sections);
    auto imports = ordered_json::array();
    for (const auto& lib : pe.imports) {
        auto fns = ordered_json::array();
        for (const auto& f : lib.functions) fns.push_back(f.display());
        imports.push_back({{"library", lib.name}, {"functions", std::move(fns)}});
    }
    j["imports"] = std::move(imports);
    if (pe.exports) {
        auto entries = ordered_json::array();
        for (const auto& e : pe.exports->entries) {
            entries.push_back({{"name", e.name.value_or("")}, {"ordinal", e.ordinal}, {"rva", e.rva}});
        }
        j["exports"] = {{"module_name", pe.exports->module_name}, {"entries", std::move(entries)}};
    }
    j["version_info"] = pe.version_info.strings;
    j["icons"] = pe.icons.size();
    if (pe.overlay) j["overlay"] = {{"offset", pe.overlay->offset}, {"length", pe.overlay->length}};
    j["signature_present"] = pe.signature_present;
    j["tls_callbacks"] = pe.tls.callback_count;
    j["warnings"] = pe.warnings;
    return j;
}

ordered_json zip_json(const ZipArchive& a) {
    auto entries = ordered_json::array();
    for (const auto& e : a.entries) {
        entries.push_back({{"name", e.name},
                           {"method", e.method_name()},
                           {"encrypted", e.encrypted()},
                           {"compressed_size", e.compressed_size},
                           {"size", e.uncompressed_size},
                           {"crc32", e.crc32}});
    }
    return {{"entries", std::move(entries)}, {"prefix_length", a.prefix_length}, {"comment", a.comment}};
}

ordered_json capture_json(const CaptureModel& m) {
    auto streams = ordered_json::array();
    for (std::size_t s = 0; s < m.streams.size(); ++s) {
        const auto& st = m.streams[s];
        auto txns = ordered_json::array();
        for (const auto& t : m.transactions[s]) {
            txns.push_back({{"method", t.method},
                            {"target", t.target},
                            {"status", t.status_code},
                            {"content_type", t.response_header("Content-Type").value_or("")},
                            {"body_length", t.body_decoded.size()}});
        }
        streams.push_back({{"key", st.key.to_string()},
                           {"client_bytes", st.client_payload.size()},
                           {"server_bytes", st.server_payload.size()},
                           {"packets", st.packets},
                           {"gaps", st.gaps.size()},
                           {"transactions", std::move(txns)}});
    }
    return {{"records", m.capture.records.size()}, {"link_type", m.capture.link_type}, {"streams", std::move(streams)}};
}

ordered_json log_json(const TransformLog& log) {
    auto steps = ordered_json::array();
    for (const auto& s : log.steps) {
        steps.push_back({{"iteration", s.iteration}, {"pass", s.pass}, {"changes", s.changes}});
    }
    auto fired = ordered_json::array();
    for (const auto& p : deobfuscation_passes()) {
        if (log.fired(p)) fired.push_back(p);
    }
    return {{"iterations", log.iterations},
            {"truncated", log.truncated},
            {"passes_fired", std::move(fired)},
            {"steps", std::move(steps)},
            {"flags", log.flags}};
}

} // namespace

namespace {

AnalysisRun new_run(const AnalyzeOptions& options) {
    SessionSettings settings;
    settings.min_string_length = options.min_string_length;
    settings.entropy_block_size = options.block_size;
    return AnalysisRun{AnalysisSession(builtin_registry(), settings), 0, {}, {}, false};
}

} // namespace

AnalysisRun analyze_buffer(DataBuffer buffer, const AnalyzeOptions& options) {
    auto run = new_run(options);
    run.root = run.session.open_artifact(std::move(buffer)).id;
    if (options.deep) expand_deep(run, run.root, options);
    return run;
}

AnalysisRun analyze_path(const std::string& path, const AnalyzeOptions& options) {
    auto run = new_run(options);
    run.root = run.session.open_file(path).id;
    if (options.deep) expand_deep(run, run.root, options);
    return run;
}

void expand_deep(AnalysisRun& run, NodeId start, const AnalyzeOptions& options) {
    std::deque<NodeId> queue{start};
    while (!queue.empty() && !run.limit_reached) {
        const auto id = queue.front();
        queue.pop_front();
        if (run.session.depth_of(id) >= run.session.settings().max_depth) {
            if (!run.session.node(id).parse_error && run.session.node(id).tag() != tags::binary &&
                run.session.node(id).tag() != tags::text) {
                run.warnings.push_back("node " + std::to_string(id) + ": depth limit reached; not expanded");
            }
            continue;
        }
        const auto before = run.session.node(id).children.size();
        expand_one(run, id, options);
        const auto& kids = run.session.node(id).children;
        queue.insert(queue.end(), kids.begin() + static_cast<std::ptrdiff_t>(before), kids.end());
    }
}

std::string report_json(const AnalysisRun& run, const AnalyzeOptions& options) {
    const auto& s = run.session;
    ordered_json doc;
    doc["tool"] = "casefile";
    doc["version"] = tool_version;
    const auto& root = s.node(run.root);
    const auto root_digests = hash_buffer(root.buffer.bytes(), std::vector<HashAlgorithm>{HashAlgorithm::sha256});
    doc["input"] = {{"name", root.buffer.name},
                    {"size", root.buffer.size()},
                    {"sha256", root_digests.at(HashAlgorithm::sha256)}};
    doc["options"] = {{"deep", options.deep},
                      {"passwords_supplied", options.passwords.size()},
                      {"min_string_length", options.min_string_length},
                      {"block_size", options.block_size}};
    auto nodes = ordered_json::array();
    for (auto id : s.depth_first()) {
        const auto& n = s.node(id);
        const auto data = n.buffer.bytes();
        ordered_json j;
        j["id"] = n.id;
        j["name"] = n.buffer.name;
        j["parent"] = n.parent ? ordered_json(*n.parent) : ordered_json(nullptr);
        j["depth"] = s.depth_of(id);
        j["action"] = n.action_label;
        j["tag"] = n.tag();
        j["method"] = to_string(n.identification.method);
        j["size"] = data.size();
        j["content"] = n.content.is_text() ? std::string("text/") + to_string(n.content.encoding) : "binary";
        auto viewers = ordered_json::array();
        for (const auto& v : n.viewers) viewers.push_back(to_string(v.kind));
        j["viewers"] = std::move(viewers);
        j["primary_viewer"] = to_string(primary_viewer(n.viewers).kind);
        if (n.parse_error) j["parse_error"] = *n.parse_error;
        j["hints"] = hints_json(n.hints);

        ordered_json digests;
        for (const auto& [alg, hex] : hash_buffer(data, s.settings().hash_algorithms)) digests[to_string(alg)] = hex;
        j["digests"] = std::move(digests);
        const auto profile = entropy_profile(data, s.settings().entropy_block_size);
        double peak = 0;
        for (double b : profile.blocks) peak = std::max(peak, b);
        j["entropy"] = {{"overall", profile.overall},
                        {"block_size", profile.block_size},
                        {"blocks", profile.blocks.size()},
                        {"max_block", peak}};
        j["strings"] = extract_strings(data, s.settings().min_string_length).size();
        auto arts = ordered_json::array();
        for (const auto& a : scan(data, s.settings().min_string_length, n.tag())) {
            arts.push_back({{"kind", to_string(a.kind)},
                            {"value", a.value},
                            {"offset", a.location.offset},
                            {"encoding", to_string(a.location.encoding)},
                            {"risk", to_string(a.risk)},
                            {"explanation", a.explanation}});
        }
        j["artifacts"] = std::move(arts);

        if (const auto* pe = n.model_as<PeFile>()) j["pe"] = pe_json(*pe);
        if (const auto* zip = n.model_as<ZipArchive>()) j["zip"] = zip_json(*zip);
        if (const auto* cap = n.model_as<CaptureModel>()) j["pcap"] = capture_json(*cap);
        if (const auto* img = n.model_as<ImageModel>()) j["image"] = {{"width", img->width}, {"height", img->height}};
        if (const auto* icons = n.model_as<IconSet>()) j["icons"] = icons->size();
        if (auto it = run.deobfuscation.find(id); it != run.deobfuscation.end()) j["deobfuscation"] = log_json(it->second);
        auto kids = ordered_json::array();
        for (auto c : n.children) kids.push_back(c);
        j["children"] = std::move(kids);
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);
    doc["warnings"] = run.warnings;
    doc["limit_reached"] = run.limit_reached;
    return doc.dump(2) + "\n";
}

std::string session_json(const AnalysisSession& s) {
    auto nodes = ordered_json::array();
    for (auto id : s.depth_first()) {
        const auto& n = s.node(id);
        nodes.push_back({{"id", n.id},
                         {"name", n.buffer.name},
                         {"tag", n.tag()},
                         {"method", to_string(n.identification.method)},
                         {"parent", n.parent ? ordered_json(*n.parent) : ordered_json(nullptr)},
                         {"action", n.action_label},
                         {"hints", hints_json(n.hints)}});
    }
    ordered_json doc;
    doc["nodes"] = std::move(nodes);
    return doc.dump(2) + "\n";
}

} // namespace casefile
