// casefile - offline artifact analysis workbench

#include <casefile/view/viewers.hpp>

#include <casefile/core/error.hpp>
#include <casefile/core/unicode.hpp>
#include <casefile/engine/session.hpp>
#include <casefile/zip/zip.hpp>

#include <cstdio>

namespace casefile {

namespace {

const char* style_of(TokenKind kind) {
    switch (kind) {
    case TokenKind::keyword: return "token.keyword";
    case TokenKind::string_literal: return "token.string";
    case TokenKind::number_literal: return "token.number";
    case TokenKind::comment: return "token.comment";
    case TokenKind::regex: return "token.regex";
    default: return nullptr;
    }
}

/// Re-lexing a+b gives back exactly a and b.
bool stays_apart(const Token& a, const Token& b) {
    auto joined = a.text + b.text;
    auto again = tokenize_js(joined);
    return again.size() == 2 && again[0].text == a.text && again[1].text == b.text;
}

struct Piece {
    std::string text;
    const char* style = nullptr;
};

} // namespace

LexicalViewModel make_lexical_view(std::u32string_view source) {
    LexicalViewModel m;
    m.tokens = tokenize_js(source);
    return m;
}

std::vector<FoldRegion> function_body_folds(const std::vector<Token>& tokens) {
    std::vector<FoldRegion> folds;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].is(TokenKind::keyword, U"function")) continue;
        std::size_t j = i + 1;
        while (j < tokens.size() && !tokens[j].is(TokenKind::punctuation, U"{")) ++j;
        if (j == tokens.size()) break;
        int depth = 0;
        std::size_t k = j;
        for (; k < tokens.size(); ++k) {
            if (tokens[k].is(TokenKind::punctuation, U"{")) ++depth;
            if (tokens[k].is(TokenKind::punctuation, U"}") && --depth == 0) break;
        }
        if (k == tokens.size()) break;
        if (k > j + 1) folds.push_back({j + 1, k});
        i = k;
    }
    return folds;
}

std::vector<StyledLine> render_lexical_view(const LexicalViewModel& model) {
    const auto& toks = model.tokens;
    std::vector<Piece> pieces;
    std::optional<std::size_t> last_visible;

    auto emit_marker = [&](std::size_t next, bool newline) {
        pieces.push_back({std::string(fold_marker), "fold"});
        if (newline) {
            pieces.push_back({"\n", nullptr});
            return;
        }
        // keep the neighbours from fusing once the hidden text is gone
        std::size_t n = next;
        while (n < toks.size() && model.hidden.count(toks[n].kind)) ++n;
        if (last_visible && n < toks.size() && !toks[*last_visible].trivia() && !toks[n].trivia() &&
            !stays_apart(toks[*last_visible], toks[n])) {
            pieces.push_back({" ", nullptr});
        }
    };

    for (std::size_t i = 0; i < toks.size();) {
        const FoldRegion* fold = nullptr;
        for (const auto& f : model.folds) {
            if (f.first == i && f.last > f.first && f.last <= toks.size()) fold = &f;
        }
        if (fold) {
            emit_marker(fold->last, false);
            i = fold->last;
            continue;
        }
        const auto& t = toks[i];
        if (model.hidden.count(t.kind)) {
            std::size_t j = i;
            bool newline = false;
            while (j < toks.size() && model.hidden.count(toks[j].kind)) {
                for (auto c : toks[j].text) newline |= is_js_line_terminator(c);
                ++j;
            }
            emit_marker(j, newline);
            i = j;
            continue;
        }
        pieces.push_back({to_utf8(t.text), style_of(t.kind)});
        last_visible = i;
        ++i;
    }

    std::vector<StyledLine> lines(1);
    for (const auto& p : pieces) {
        std::size_t start = 0;
        while (true) {
            const auto nl = p.text.find('\n', start);
            const auto part = p.text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
            auto& line = lines.back();
            if (p.style && !part.empty()) {
                line.spans.push_back({line.text.size(), line.text.size() + part.size(), p.style});
            }
            line.text += part;
            if (nl == std::string::npos) break;
            lines.emplace_back();
            start = nl + 1;
        }
    }
    return lines;
}

std::string join_lines(const std::vector<StyledLine>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back('\n');
        out += lines[i].text;
    }
    return out;
}

ContainerViewModel container_view(const ZipArchive& archive) {
    ContainerViewModel m;
    for (const auto& e : archive.entries) {
        std::string attrs = e.method_name();
        if (e.encrypted()) attrs += ",encrypted";
        if (e.directory()) attrs += ",dir";
        m.entries.push_back({e.name, e.uncompressed_size, attrs, std::nullopt});
    }
    return m;
}

ContainerViewModel container_view(const FolderModel& folder) {
    ContainerViewModel m;
    for (const auto& e : folder.entries) {
        m.entries.push_back({e.name, e.size, e.directory ? "dir" : "file", std::nullopt});
    }
    return m;
}

std::vector<std::string> render_container_view(const ContainerViewModel& model) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : model.entries) {
        rows.push_back({e.name, std::to_string(e.size), e.attributes, e.child ? "#" + std::to_string(*e.child) : "-"});
    }
    return render_table({"name", "size", "attributes", "node"}, rows);
}

Bytes render_ppm(const ImageModel& image) {
    if (image.pixels.size() != std::size_t{image.width} * image.height) {
        throw Error(Errc::invalid_argument, "image model pixel count does not match its dimensions");
    }
    auto header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    Bytes out(header.begin(), header.end());
    out.reserve(out.size() + image.pixels.size() * 3);
    for (const auto& p : image.pixels) {
        for (std::uint8_t c : {p.r, p.g, p.b}) {
            // c*a + 255*(255-a), rounded
            const unsigned v = c * p.a + 255u * (255u - p.a);
            out.push_back(static_cast<std::uint8_t>((v + 127) / 255));
        }
    }
    return out;
}

std::string render_annotation(const ApiAnnotation& a) {
    std::string s = a.library + "!" + a.api;
    if (!a.known_signature) return s;
    s += "(";
    for (std::size_t i = 0; i < a.bindings.size(); ++i) {
        if (i) s += ", ";
        const auto& b = a.bindings[i];
        s += b.name + "=";
        if (b.value) {
            char buf[24];
            std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(*b.value));
            s += buf;
        } else {
            s += b.source_text;
        }
    }
    if (a.partial) s += a.bindings.empty() ? "..." : ", ...";
    return s + ")";
}

std::vector<std::string> render_disassembly(const DisassemblyModel& model) {
    std::vector<std::string> lines;
    for (const auto& r : model.regions) {
        char head[96];
        std::snprintf(head, sizeof head, "; section %s at 0x%llx (file offset 0x%llx), %u-bit", r.section.c_str(),
                      static_cast<unsigned long long>(r.address), static_cast<unsigned long long>(r.offset),
                      model.bitness);
        lines.emplace_back(head);
        for (const auto& insn : r.instructions) {
            char addr[24];
            std::snprintf(addr, sizeof addr, "%08llx  ", static_cast<unsigned long long>(insn.address));
            std::string hex = to_hex(insn.bytes);
            std::string spaced;
            for (std::size_t i = 0; i < hex.size(); i += 2) {
                if (i) spaced.push_back(' ');
                spaced += hex.substr(i, 2);
            }
            if (spaced.size() < 24) spaced.resize(24, ' ');
            std::string line = addr + spaced + "  " + insn.text();
            if (insn.annotation) line += "  ; " + render_annotation(*insn.annotation);
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

} // namespace casefile
