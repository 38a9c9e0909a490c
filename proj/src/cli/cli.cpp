// casefile - offline artifact analysis workbench
// Subcommands, output formats and the exit-code contract.

#include <casefile/cli/cli.hpp>

#include <casefile/analysis/report.hpp>
#include <casefile/core/error.hpp>
#include <casefile/core/unicode.hpp>
#include <casefile/disasm/x86.hpp>
#include <casefile/extract/artifacts.hpp>
#include <casefile/extract/compare.hpp>
#include <casefile/extract/digest.hpp>
#include <casefile/extract/entropy.hpp>
#include <casefile/extract/strings.hpp>
#include <casefile/pe/pe.hpp>
#include <casefile/view/viewers.hpp>
#include <casefile/zip/zip.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

namespace casefile {

using nlohmann::ordered_json;

namespace {

struct Globals {
    std::string format;
    std::string json_path;
    std::vector<std::string> passwords;
    std::size_t min_len = default_min_string_length;
    std::size_t block = 256;
    bool deep = false;
};

/// One command result in every shape the front end can print.
struct Output {
    ordered_json json;
    std::vector<std::string> text;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    std::string default_format = "text";
    int status = exit_code::ok;
};

std::string hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q.push_back('"');
        q.push_back(c);
    }
    return q + "\"";
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line.push_back(',');
        line += csv_field(cells[i]);
    }
    return line;
}

const char* severity_color(Severity s) {
    switch (s) {
    case Severity::info: return "\x1b[36m";
    case Severity::suspicious: return "\x1b[33m";
    case Severity::high_risk: return "\x1b[31m";
    }
    return "";
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void emit(const Output& o, const Globals& g, std::ostream& out) {
    const auto format = g.format.empty() ? o.default_format : g.format;
    if (format == "json") {
        out << o.json.dump(2) << '\n';
    } else if (format == "csv") {
        if (o.csv_header.empty()) throw Error(Errc::unsupported, "this command has no CSV form");
        out << csv_line(o.csv_header) << '\n';
        for (const auto& r : o.csv_rows) out << csv_line(r) << '\n';
    } else {
        for (const auto& l : o.text) out << l << '\n';
    }
    if (!g.json_path.empty()) {
        const auto doc = o.json.dump(2) + "\n";
        write_file(g.json_path, to_bytes(doc));
    }
}

void table_into(Output& o, std::vector<std::string> header, std::vector<std::vector<std::string>> rows) {
    o.text = render_table(header, rows);
    o.csv_header = std::move(header);
    o.csv_rows = std::move(rows);
}

AnalysisSession builtin_session(const Globals& g) {
    SessionSettings s;
    s.min_string_length = g.min_len;
    s.entropy_block_size = g.block;
    return AnalysisSession(builtin_registry(), s);
}

// ---- commands ----

Output cmd_identify(const std::string& path, const Globals& g) {
    auto session = builtin_session(g);
    const auto& n = session.open_file(path);
    Output o;
    const auto plan = plan_summary(n.viewers);
    o.text.push_back(n.tag() + " (" + to_string(n.identification.method) + ") viewers: " + plan);
    auto viewers = ordered_json::array();
    for (const auto& v : n.viewers) viewers.push_back(to_string(v.kind));
    o.json = {{"name", n.buffer.name},
              {"tag", n.tag()},
              {"method", to_string(n.identification.method)},
              {"viewers", viewers},
              {"primary_viewer", to_string(primary_viewer(n.viewers).kind)}};
    if (n.parse_error) o.json["parse_error"] = *n.parse_error;
    o.csv_header = {"name", "tag", "method", "viewers"};
    o.csv_rows = {{n.buffer.name, n.tag(), to_string(n.identification.method), plan}};
    return o;
}

Output cmd_analyze(const std::string& path, const Globals& g, const CliEnvironment& env) {
    AnalyzeOptions opts;
    opts.deep = g.deep;
    opts.passwords = g.passwords;
    opts.min_string_length = g.min_len;
    opts.block_size = g.block;
    const auto run = analyze_path(path, opts);
    Output o;
    o.json = ordered_json::parse(report_json(run, opts));
    const auto& s = run.session;
    std::istringstream overview(s.overview().to_text());
    for (std::string line; std::getline(overview, line);) o.text.push_back(line);
    for (auto id : s.depth_first()) {
        const auto& n = s.node(id);
        for (const auto& h : n.hints) {
            std::string sev = std::string("[") + to_string(h.severity) + "]";
            if (env.color) sev = severity_color(h.severity) + sev + "\x1b[0m";
            o.text.push_back("#" + std::to_string(id) + " " + sev + " " + h.text);
        }
        if (auto it = run.deobfuscation.find(id); it != run.deobfuscation.end() && !it->second.steps.empty()) {
            std::string passes;
            for (const auto& p : deobfuscation_passes()) {
                if (it->second.fired(p)) passes += (passes.empty() ? "" : ", ") + p;
            }
            o.text.push_back("#" + std::to_string(id) + " deobfuscation passes fired: " + passes);
        }
    }
    for (const auto& w : run.warnings) o.text.push_back("warning: " + w);
    o.csv_header = {"id", "parent", "depth", "tag", "method", "name", "action", "size", "hints"};
    for (const auto& n : o.json["nodes"]) {
        o.csv_rows.push_back({std::to_string(n["id"].get<NodeId>()),
                              n["parent"].is_null() ? "" : std::to_string(n["parent"].get<NodeId>()),
                              std::to_string(n["depth"].get<std::size_t>()), n["tag"].get<std::string>(),
                              n["method"].get<std::string>(), n["name"].get<std::string>(),
                              n["action"].get<std::string>(), std::to_string(n["size"].get<std::size_t>()),
                              std::to_string(n["hints"].size())});
    }
    if (s.node(run.root).parse_error) o.status = exit_code::failure;
    return o;
}

Output cmd_strings(const std::string& path, const Globals& g) {
    const auto data = read_file(path);
    Output o;
    auto arr = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : extract_strings(data, g.min_len)) {
        arr.push_back({{"offset", s.offset}, {"encoding", to_string(s.encoding)}, {"length", s.byte_length},
                       {"value", s.value}});
        rows.push_back({hex(s.offset), to_string(s.encoding), std::to_string(s.byte_length), s.value});
    }
    o.json = {{"strings", arr}};
    table_into(o, {"offset", "encoding", "length", "value"}, std::move(rows));
    return o;
}

Output cmd_artifacts(const std::string& path, const Globals& g) {
    auto session = builtin_session(g);
    const auto& n = session.open_file(path);
    Output o;
    auto arr = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    for (const auto& a : scan(n.buffer.bytes(), g.min_len, n.tag())) {
        arr.push_back({{"kind", to_string(a.kind)},
                       {"value", a.value},
                       {"offset", a.location.offset},
                       {"encoding", to_string(a.location.encoding)},
                       {"risk", to_string(a.risk)},
                       {"explanation", a.explanation}});
        rows.push_back({to_string(a.kind), a.value, hex(a.location.offset), to_string(a.location.encoding),
                        to_string(a.risk), a.explanation});
    }
    o.json = {{"tag", n.tag()}, {"artifacts", arr}};
    table_into(o, {"kind", "value", "offset", "encoding", "risk", "explanation"}, std::move(rows));
    return o;
}

Output cmd_hash(const std::string& path, const std::vector<std::string>& algos) {
    const auto data = read_file(path);
    std::vector<std::string> names = algos.empty() ? std::vector<std::string>{"crc32", "md5", "sha1", "sha256"} : algos;
    Output o;
    std::vector<std::vector<std::string>> rows;
    for (const auto& [alg, digest] : hash_buffer(data, names)) {
        o.json[to_string(alg)] = digest;
        rows.push_back({to_string(alg), digest});
    }
    table_into(o, {"algorithm", "digest"}, std::move(rows));
    return o;
}

Output cmd_entropy(const std::string& path, const Globals& g) {
    const auto data = read_file(path);
    const auto p = entropy_profile(data, g.block);
    Output o;
    o.default_format = "csv";
    o.json = {{"block_size", p.block_size}, {"overall", p.overall}, {"blocks", p.blocks}};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < p.blocks.size(); ++i) rows.push_back({std::to_string(i), fmt_double(p.blocks[i])});
    table_into(o, {"block", "entropy"}, std::move(rows));
    o.text.insert(o.text.begin(), "overall " + fmt_double(p.overall) + " bits/byte, block size " +
                                      std::to_string(p.block_size));
    return o;
}

Output cmd_compare(const std::string& a, const std::string& b) {
    const auto da = read_file(a);
    const auto db = read_file(b);
    Output o;
    auto arr = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    for (const auto& d : binary_compare(da, db)) {
        arr.push_back({{"kind", to_string(d.kind)}, {"offset_a", d.offset_a}, {"offset_b", d.offset_b},
                       {"length", d.length}});
        rows.push_back({to_string(d.kind), hex(d.offset_a), hex(d.offset_b), std::to_string(d.length)});
    }
    o.json = {{"identical", arr.empty()}, {"ranges", arr}};
    table_into(o, {"kind", "offset_a", "offset_b", "length"}, std::move(rows));
    if (arr.empty()) o.text = {"identical"};
    return o;
}

Output cmd_disasm(const std::string& path, bool raw, unsigned bits, std::uint64_t base) {
    const auto data = read_file(path);
    DisassemblyModel model;
    if (raw) {
        if (bits != 32 && bits != 64) throw Error(Errc::invalid_argument, "--bits must be 32 or 64");
        model.bitness = bits;
        model.regions.push_back({"raw", 0, base, linear_sweep(data, 0, data.size(), bits, base)});
    } else {
        if (!looks_like_pe(data)) throw Error(Errc::unsupported, "disasm needs a PE image (or --raw)");
        model = disassemble_pe(data, parse_pe(data));
    }
    Output o;
    o.text = render_disassembly(model);
    auto regions = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : model.regions) {
        auto insns = ordered_json::array();
        for (const auto& i : r.instructions) {
            ordered_json j{{"address", i.address}, {"bytes", to_hex(i.bytes)}, {"text", i.text()}};
            std::string note;
            if (i.annotation) {
                note = render_annotation(*i.annotation);
                auto params = ordered_json::array();
                for (const auto& b : i.annotation->bindings) {
                    params.push_back({{"name", b.name},
                                      {"value", b.value ? ordered_json(*b.value) : ordered_json(nullptr)},
                                      {"source", b.source_text}});
                }
                j["api"] = {{"library", i.annotation->library},
                            {"name", i.annotation->api},
                            {"partial", i.annotation->partial},
                            {"parameters", params}};
            }
            rows.push_back({hex(i.address), to_hex(i.bytes), i.text(), note});
            insns.push_back(std::move(j));
        }
        regions.push_back({{"section", r.section}, {"address", r.address}, {"instructions", insns}});
    }
    o.json = {{"bitness", model.bitness}, {"regions", regions}};
    o.csv_header = {"address", "bytes", "text", "annotation"};
    o.csv_rows = std::move(rows);
    return o;
}

Output cmd_deobfuscate(const std::string& path, std::size_t max_iterations) {
    const auto data = read_file(path);
    const auto result = deobfuscate_text(data, max_iterations);
    const auto source = to_utf8(result.text());
    Output o;
    std::istringstream in(source);
    for (std::string line; std::getline(in, line);) o.text.push_back(line);
    o.text.push_back("");
    o.text.push_back("--- transform log (" + std::to_string(result.log.iterations) + " iterations" +
                     (result.log.truncated ? ", truncated" : "") + ") ---");
    auto steps = ordered_json::array();
    for (const auto& s : result.log.steps) {
        o.text.push_back("iteration " + std::to_string(s.iteration) + ": " + s.pass + " (" +
                         std::to_string(s.changes) + " changes)");
        steps.push_back({{"iteration", s.iteration}, {"pass", s.pass}, {"changes", s.changes}});
        o.csv_rows.push_back({std::to_string(s.iteration), s.pass, std::to_string(s.changes)});
    }
    for (const auto& f : result.log.flags) o.text.push_back("flag: " + f);
    o.csv_header = {"iteration", "pass", "changes"};
    o.json = {{"source", source},
              {"iterations", result.log.iterations},
              {"truncated", result.log.truncated},
              {"steps", steps},
              {"flags", result.log.flags}};
    return o;
}

Output cmd_pcap_list(const std::string& path) {
    const auto m = analyze_capture(read_file(path));
    Output o;
    auto arr = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t s = 0; s < m.streams.size(); ++s) {
        const auto& st = m.streams[s];
        std::string first;
        if (!m.transactions[s].empty()) first = m.transactions[s].front().label();
        rows.push_back({st.key.to_string(), std::to_string(st.packets), std::to_string(st.client_payload.size()),
                        std::to_string(st.server_payload.size()), std::to_string(m.transactions[s].size()), first});
        arr.push_back({{"key", st.key.to_string()},
                       {"packets", st.packets},
                       {"client_bytes", st.client_payload.size()},
                       {"server_bytes", st.server_payload.size()},
                       {"transactions", m.transactions[s].size()},
                       {"gaps", st.gaps.size()}});
    }
    o.json = {{"records", m.capture.records.size()}, {"streams", arr}};
    table_into(o, {"stream", "packets", "client_bytes", "server_bytes", "transactions", "first_request"},
               std::move(rows));
    return o;
}

Output cmd_pcap_stream(const std::string& path, const std::string& key_text, const std::string& out_path,
                       const std::string& direction) {
    const auto m = analyze_capture(read_file(path));
    const auto key = StreamKey::parse(key_text);
    std::size_t s = 0;
    while (s < m.streams.size() && !(m.streams[s].key == key)) ++s;
    if (s == m.streams.size()) throw Error(Errc::not_found, "no stream " + key_text);
    const auto& st = m.streams[s];
    if (!out_path.empty()) {
        const auto d = direction == "server" ? Direction::server_to_client : Direction::client_to_server;
        write_file(out_path, st.payload(d));
    }
    Output o;
    auto arr = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < m.transactions[s].size(); ++t) {
        const auto& x = m.transactions[s][t];
        const auto type = x.response_header("Content-Type").value_or("");
        rows.push_back({std::to_string(t), x.method, x.target, std::to_string(x.status_code), type,
                        std::to_string(x.body_decoded.size())});
        arr.push_back({{"index", t}, {"method", x.method}, {"target", x.target}, {"status", x.status_code},
                       {"content_type", type}, {"body_length", x.body_decoded.size()}, {"notes", x.notes}});
    }
    o.json = {{"key", st.key.to_string()},
              {"client_bytes", st.client_payload.size()},
              {"server_bytes", st.server_payload.size()},
              {"transactions", arr}};
    table_into(o, {"index", "method", "target", "status", "content_type", "body_length"}, std::move(rows));
    return o;
}

Output cmd_pcap_export(const std::string& path, const std::string& key_text, std::size_t index,
                       const std::string& out_path) {
    AnalysisSession session(builtin_registry());
    const auto root = session.open_file(path).id;
    const auto& child = export_body(session, root, StreamKey::parse(key_text), index);
    if (out_path.empty()) throw Error(Errc::invalid_argument, "export needs --out FILE");
    write_file(out_path, child.buffer.bytes());
    Output o;
    o.text.push_back("wrote " + std::to_string(child.buffer.size()) + " bytes (" + child.tag() + ") from " +
                     child.action_label + " to " + out_path);
    o.json = {{"action", child.action_label}, {"size", child.buffer.size()}, {"tag", child.tag()},
              {"name", child.buffer.name}};
    return o;
}

Output cmd_pcap_search(const std::string& path, const std::string& needle) {
    const auto capture = parse_pcap(read_file(path));
    Output o;
    auto arr = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : search_payloads(capture, to_bytes(needle))) {
        std::string offsets;
        for (auto off : m.offsets) offsets += (offsets.empty() ? "" : " ") + std::to_string(off);
        rows.push_back({m.key.to_string(), to_string(m.direction), offsets});
        arr.push_back({{"key", m.key.to_string()}, {"direction", to_string(m.direction)}, {"offsets", m.offsets}});
    }
    o.json = {{"needle", needle}, {"matches", arr}};
    table_into(o, {"stream", "direction", "offsets"}, std::move(rows));
    return o;
}

Output cmd_hex(const std::string& path, std::uint64_t offset, std::uint64_t length, std::size_t width,
               std::optional<std::uint64_t> infer) {
    auto session = AnalysisSession(builtin_registry());
    const auto& n = session.open_file(path);
    const auto data = n.buffer.bytes();
    BufferViewModel model;
    model.bytes_per_line = width;
    for (const auto& v : n.viewers) {
        if (v.kind == ViewerKind::buffer) model.zones = v.config.zones;
    }
    const auto total = line_count(data, width);
    const auto first = std::min<std::uint64_t>(offset / width, total);
    const auto end = length == 0 ? total : std::min<std::uint64_t>(total, (offset + length + width - 1) / width);
    Output o;
    o.text = render_buffer_view(data, model, first, end > first ? end - first : 0);
    auto zones = ordered_json::array();
    for (const auto& z : model.zones) {
        zones.push_back({{"label", z.label}, {"style", z.style}, {"offset", z.range.offset}, {"length", z.range.length}});
    }
    o.json = {{"tag", n.tag()}, {"lines", o.text}, {"zones", zones}};
    if (infer) {
        if (*infer >= data.size()) throw Error(Errc::out_of_bounds, "offset beyond end of buffer");
        auto arr = ordered_json::array();
        for (const auto& i : infer_at(data, *infer)) {
            o.text.push_back(std::string(to_string(i.kind)) + " @" + hex(i.range.offset) + ": " + i.value);
            arr.push_back({{"kind", to_string(i.kind)}, {"length", i.range.length}, {"value", i.value}});
        }
        o.json["inferences"] = arr;
    }
    return o;
}

Output cmd_lexical(const std::string& path, bool show_comments, bool fold_functions) {
    const auto data = read_file(path);
    auto model = make_lexical_view(from_utf8(buffer_text(data)));
    if (show_comments) model.hidden.clear();
    if (fold_functions) model.folds = function_body_folds(model.tokens);
    const auto lines = render_lexical_view(model);
    Output o;
    auto arr = ordered_json::array();
    for (const auto& l : lines) {
        o.text.push_back(l.text);
        auto spans = ordered_json::array();
        for (const auto& s : l.spans) spans.push_back({{"begin", s.begin}, {"end", s.end}, {"style", s.style}});
        arr.push_back({{"text", l.text}, {"spans", spans}});
    }
    o.json = {{"lines", arr}};
    return o;
}

Output cmd_image(const std::string& path, const std::string& out_path) {
    auto session = AnalysisSession(builtin_registry());
    const auto& n = session.open_file(path);
    std::optional<ImageModel> image;
    if (const auto* bmp = n.model_as<ImageModel>()) image = *bmp;
    const std::vector<IconImage>* icons = n.model_as<IconSet>();
    if (const auto* pe = n.model_as<PeFile>()) icons = &pe->icons;
    for (std::size_t i = 0; !image && icons && i < icons->size(); ++i) image = (*icons)[i].image;
    if (!image) throw Error(Errc::unsupported, "no decodable image in " + n.tag() + " artifact");
    if (out_path.empty()) throw Error(Errc::invalid_argument, "image needs --out FILE");
    write_file(out_path, render_ppm(*image));
    Output o;
    o.text.push_back("wrote " + std::to_string(image->width) + "x" + std::to_string(image->height) + " PPM to " +
                     out_path);
    o.json = {{"width", image->width}, {"height", image->height}, {"out", out_path}};
    return o;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliEnvironment& env) {
    CLI::App app{"casefile - offline artifact analysis workbench", "casefile"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--json", g.json_path, "also write the JSON document to PATH");
    app.add_option("--password", g.passwords, "archive password (repeatable)")->allow_extra_args(false)->take_all();
    app.add_option("--min-str-len", g.min_len, "minimum string length")->check(CLI::Range(1, 1 << 20));
    app.add_option("--block", g.block, "entropy block size")->check(CLI::Range(1, 1 << 30));
    app.add_flag("--deep", g.deep, "expand derived artifacts recursively");

    std::function<Output()> action;
    std::string path, path_b, key, needle, out_path, direction = "client";
    std::vector<std::string> algos;
    std::size_t index = 0, max_iter = default_max_iterations, width = 16;
    std::uint64_t offset = 0, length = 0, base = 0;
    std::optional<std::uint64_t> infer;
    unsigned bits = 32;
    bool raw = false, show_comments = false, fold = false;

    auto sub = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };
    auto needs_path = [&](CLI::App* s) { s->add_option("path", path, "input file")->required(); };

    auto* identify = sub("identify", "print tag, method and viewer plan");
    needs_path(identify);
    identify->callback([&] { action = [&] { return cmd_identify(path, g); }; });

    auto* analyze = sub("analyze", "full analysis report");
    needs_path(analyze);
    analyze->callback([&] { action = [&] { return cmd_analyze(path, g, env); }; });

    auto* strings = sub("strings", "ASCII and UTF-16LE strings");
    needs_path(strings);
    strings->callback([&] { action = [&] { return cmd_strings(path, g); }; });

    auto* artifacts = sub("artifacts", "classified string artifacts with risk");
    needs_path(artifacts);
    artifacts->callback([&] { action = [&] { return cmd_artifacts(path, g); }; });

    auto* hash = sub("hash", "CRC32 / MD5 / SHA-1 / SHA-256");
    needs_path(hash);
    hash->add_option("--algo", algos, "algorithm (repeatable)");
    hash->callback([&] { action = [&] { return cmd_hash(path, algos); }; });

    auto* entropy = sub("entropy", "per-block Shannon entropy");
    needs_path(entropy);
    entropy->callback([&] { action = [&] { return cmd_entropy(path, g); }; });

    auto* compare = sub("compare", "positional binary compare");
    compare->add_option("a", path, "first file")->required();
    compare->add_option("b", path_b, "second file")->required();
    compare->callback([&] { action = [&] { return cmd_compare(path, path_b); }; });

    auto* disasm = sub("disasm", "x86 linear sweep with API annotation");
    needs_path(disasm);
    disasm->add_flag("--raw", raw, "treat the file as raw code");
    disasm->add_option("--bits", bits, "32 or 64 (raw mode)");
    disasm->add_option("--base", base, "load address (raw mode)");
    disasm->callback([&] { action = [&] { return cmd_disasm(path, raw, bits, base); }; });

    auto* deob = sub("deobfuscate", "JavaScript deobfuscation to a fixpoint");
    needs_path(deob);
    deob->add_option("--max-iterations", max_iter, "iteration limit")->check(CLI::Range(1, 1000));
    deob->callback([&] { action = [&] { return cmd_deobfuscate(path, max_iter); }; });

    auto* hexview = sub("hex", "hex view with zones and inferences");
    needs_path(hexview);
    hexview->add_option("--offset", offset, "first byte");
    hexview->add_option("--length", length, "byte count (0 = to end)");
    hexview->add_option("--width", width, "bytes per line")->check(CLI::Range(1, 256));
    hexview->add_option("--infer", infer, "list interpretations at OFFSET");
    hexview->callback([&] { action = [&] { return cmd_hex(path, offset, length, width, infer); }; });

    auto* lexical = sub("lexical", "script view with comments folded");
    needs_path(lexical);
    lexical->add_flag("--show-comments", show_comments, "do not hide comments");
    lexical->add_flag("--fold-functions", fold, "collapse function bodies");
    lexical->callback([&] { action = [&] { return cmd_lexical(path, show_comments, fold); }; });

    auto* image = sub("image", "export an image (BMP, ICO, PE icon) as PPM");
    needs_path(image);
    image->add_option("--out", out_path, "output file")->required();
    image->callback([&] { action = [&] { return cmd_image(path, out_path); }; });

    auto* pcap = sub("pcap", "capture streams and HTTP transactions");
    pcap->require_subcommand(1);
    auto* plist = pcap->add_subcommand("list", "list TCP streams");
    plist->add_option("path", path)->required();
    plist->callback([&] { action = [&] { return cmd_pcap_list(path); }; });
    auto* pstream = pcap->add_subcommand("stream", "transactions of one stream");
    pstream->add_option("path", path)->required();
    pstream->add_option("key", key, "ip:port-ip:port")->required();
    pstream->add_option("--out", out_path, "write the payload of --direction to FILE");
    pstream->add_option("--direction", direction)->check(CLI::IsMember({"client", "server"}));
    pstream->callback([&] { action = [&] { return cmd_pcap_stream(path, key, out_path, direction); }; });
    auto* pexport = pcap->add_subcommand("export", "write one decoded HTTP body");
    pexport->add_option("path", path)->required();
    pexport->add_option("key", key)->required();
    pexport->add_option("index", index)->required();
    pexport->add_option("--out", out_path, "output file")->required();
    pexport->callback([&] { action = [&] { return cmd_pcap_export(path, key, index, out_path); }; });
    auto* psearch = pcap->add_subcommand("search", "streams whose payload contains NEEDLE");
    psearch->add_option("path", path)->required();
    psearch->add_option("needle", needle)->required();
    psearch->callback([&] { action = [&] { return cmd_pcap_search(path, needle); }; });
    for (auto* s : {plist, pstream, pexport, psearch}) s->fallthrough();

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }
    if (!action) return exit_code::usage;
    try {
        const auto o = action();
        emit(o, g, out);
        return o.status;
    } catch (const Error& e) {
        err << "casefile: " << e.what() << '\n';
        return e.code() == Errc::io ? exit_code::io : exit_code::failure;
    } catch (const std::exception& e) {
        err << "casefile: " << e.what() << '\n';
        return exit_code::failure;
    }
}

} // namespace casefile
