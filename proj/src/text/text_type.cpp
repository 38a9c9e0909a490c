// casefile - offline artifact analysis workbench

#include <casefile/text/text_type.hpp>

#include <casefile/core/unicode.hpp>
#include <casefile/text/js_lexer.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

namespace casefile {

namespace {

std::vector<std::string_view> lines_of(std::string_view text, std::size_t limit = SIZE_MAX) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= text.size() && out.size() < limit) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool ini_key(std::string_view key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '$';
    });
}

std::size_t count_outside_quotes(std::string_view line, char delim) {
    std::size_t n = 0;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == delim && !quoted) ++n;
    }
    return n;
}

} // namespace

std::optional<std::string> text_tag_for_extension(std::string_view name_hint) {
    const auto ext = extension_of(name_hint);
    static const std::array<std::pair<std::string_view, std::string_view>, 11> table{{
        {"js", "JS"}, {"mjs", "JS"}, {"cjs", "JS"}, {"jsx", "JS"}, {"ts", "JS"},
        {"json", "JSON"},
        {"ini", "INI"}, {"cfg", "INI"}, {"inf", "INI"},
        {"csv", "CSV"}, {"tsv", "CSV"},
    }};
    for (const auto& [e, tag] : table) {
        if (ext == e) return std::string(tag);
    }
    return std::nullopt;
}

bool looks_like_json(std::string_view text) {
    auto t = trim(text);
    if (t.empty() || (t.front() != '{' && t.front() != '[')) return false;
    return nlohmann::json::accept(t);
}

bool looks_like_ini(std::string_view text) {
    std::size_t sections = 0, pairs = 0, other = 0;
    for (auto raw : lines_of(text)) {
        auto line = trim(raw);
        if (line.empty() || line.front() == ';' || line.front() == '#') continue;
        if (line.front() == '[' && line.back() == ']' && line.size() > 2) {
            ++sections;
            continue;
        }
        auto eq = line.find('=');
        if (eq != std::string_view::npos && ini_key(trim(line.substr(0, eq)))) {
            ++pairs;
            continue;
        }
        ++other;
    }
    if (sections == 0 && pairs < 2) return false;
    return (sections + pairs) > other;
}

std::optional<char> csv_delimiter(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : lines_of(text, 10)) {
        if (!trim(line).empty()) lines.push_back(line);
    }
    if (lines.size() < 2) return std::nullopt;
    for (char delim : {',', '\t', ';'}) {
        const auto first = count_outside_quotes(lines.front(), delim);
        if (first == 0) continue;
        bool equal = std::all_of(lines.begin(), lines.end(),
                                 [&](std::string_view l) { return count_outside_quotes(l, delim) == first; });
        // Semicolons are also statement terminators.
        if (equal && delim == ';' && looks_like_js(text)) continue;
        if (equal) return delim;
    }
    return std::nullopt;
}

bool looks_like_js(std::string_view text) {
    const auto tokens = tokenize_js(from_utf8(text));
    std::size_t keywords = 0, structural = 0, significant = 0, words = 0, unterminated = 0;
    for (const auto& t : tokens) {
        if (t.trivia()) continue;
        ++significant;
        if (t.unterminated) ++unterminated;
        if (t.kind == TokenKind::keyword) ++keywords;
        if (t.kind == TokenKind::identifier) ++words;
        if (t.text.size() == 1 && std::u32string_view(U"(){};=").find(t.text[0]) != std::u32string_view::npos) {
            ++structural;
        }
    }
    if (significant == 0 || keywords == 0 || structural < 4) return false;
    if (unterminated * 4 > significant) return false;
    // Code-like lines end in a statement or block delimiter.
    std::size_t code_lines = 0, nonempty = 0;
    for (auto raw : lines_of(text)) {
        auto line = trim(raw);
        if (line.empty()) continue;
        ++nonempty;
        char last = line.back();
        if (last == ';' || last == '{' || last == '}' || last == ')' || last == ',' || last == '(' ||
            line.rfind("//", 0) == 0 || line.rfind("/*", 0) == 0 || line.rfind("*", 0) == 0) {
            ++code_lines;
        }
    }
    const double density = static_cast<double>(structural + keywords) / static_cast<double>(significant);
    return code_lines * 2 >= nonempty && density >= 0.15;
}

TypeIdentification detect_text_type(std::string_view utf8_text, std::string_view name_hint) {
    if (auto tag = text_tag_for_extension(name_hint)) return {*tag, IdentMethod::extension};
    if (looks_like_json(utf8_text)) return {"JSON", IdentMethod::heuristic};
    if (looks_like_ini(utf8_text)) return {"INI", IdentMethod::heuristic};
    if (csv_delimiter(utf8_text)) return {"CSV", IdentMethod::heuristic};
    if (looks_like_js(utf8_text)) return {"JS", IdentMethod::heuristic};
    return {std::string(tags::text), IdentMethod::fallback};
}

} // namespace casefile
