// casefile - offline artifact analysis workbench

#include <casefile/deobf/deobfuscate.hpp>

#include <casefile/core/unicode.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace casefile {

namespace {

Token make_token(TokenKind kind, std::u32string text) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    return t;
}

bool is_op(const Token& t, std::u32string_view text) {
    return (t.kind == TokenKind::op || t.kind == TokenKind::punctuation) && t.text == text;
}

bool is_quoted_literal(const Token& t) {
    return t.kind == TokenKind::string_literal && !t.unterminated && !t.text.empty() &&
           (t.text.front() == U'"' || t.text.front() == U'\'');
}

/// Indices of the significant (non-trivia) tokens.
std::vector<std::size_t> significant(const std::vector<Token>& tokens) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].trivia()) out.push_back(i);
    }
    return out;
}

std::u32string join_pairs(std::u32string a, std::u32string_view b) {
    if (!a.empty() && !b.empty() && a.back() >= 0xD800 && a.back() <= 0xDBFF && b.front() >= 0xDC00 &&
        b.front() <= 0xDFFF) {
        a.back() = 0x10000 + ((a.back() - 0xD800) << 10) + (b.front() - 0xDC00);
        b.remove_prefix(1);
    }
    a += b;
    return a;
}

/// Rebuilds a token list replacing [first, last] (token indices) by `with`.
std::vector<Token> splice(const std::vector<Token>& tokens,
                          const std::vector<std::pair<std::pair<std::size_t, std::size_t>, Token>>& edits) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    std::size_t i = 0;
    for (const auto& [span, with] : edits) {
        while (i < span.first) out.push_back(tokens[i++]);
        out.push_back(with);
        i = span.second + 1;
    }
    while (i < tokens.size()) out.push_back(tokens[i++]);
    renumber(out);
    return out;
}

bool would_fuse(const Token& a, const Token& b) {
    if (a.kind == TokenKind::whitespace || b.kind == TokenKind::whitespace) return false;
    auto joined = tokenize_js(a.text + b.text);
    return joined.size() != 2 || joined[0].text != a.text || joined[1].text != b.text;
}

} // namespace

PassResult remove_comments(const std::vector<Token>& tokens) {
    PassResult r;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind != TokenKind::comment) {
            r.tokens.push_back(t);
            continue;
        }
        ++r.changes;
        const bool has_newline = std::any_of(t.text.begin(), t.text.end(), is_js_line_terminator);
        // Keep line structure so automatic semicolon insertion still applies.
        if (has_newline) {
            r.tokens.push_back(make_token(TokenKind::whitespace, U"\n"));
            continue;
        }
        std::size_t j = i + 1;
        while (j < tokens.size() && tokens[j].kind == TokenKind::comment) ++j;
        if (!r.tokens.empty() && j < tokens.size() && would_fuse(r.tokens.back(), tokens[j])) {
            r.tokens.push_back(make_token(TokenKind::whitespace, U" "));
        }
    }
    renumber(r.tokens);
    return r;
}

PassResult unescape_literals(const std::vector<Token>& tokens) {
    PassResult r;
    r.tokens = tokens;
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
        auto& t = r.tokens[i];
        if (!is_quoted_literal(t) || t.text.find(U'\\') == std::u32string::npos) continue;
        auto value = string_literal_value(t.text);
        if (!value) {
            r.flags.push_back({i, "malformed escape left verbatim: " + to_utf8(t.text)});
            continue;
        }
        auto encoded = encode_string_literal(*value, t.text.front());
        if (encoded != t.text) {
            t.text = std::move(encoded);
            ++r.changes;
        }
    }
    renumber(r.tokens);
    return r;
}

PassResult apply_reverse(const std::vector<Token>& tokens) {
    PassResult r;
    const auto sig = significant(tokens);
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, Token>> edits;
    auto sig_is = [&](std::size_t k, TokenKind kind, std::u32string_view text) {
        if (k >= sig.size()) return false;
        const auto& t = tokens[sig[k]];
        if (kind == TokenKind::identifier) return t.kind == TokenKind::identifier && t.text == text;
        return is_op(t, text);
    };
    auto empty_literal = [&](std::size_t k) {
        if (k >= sig.size() || !is_quoted_literal(tokens[sig[k]])) return false;
        auto v = string_literal_value(tokens[sig[k]].text);
        return v && v->empty();
    };
    for (std::size_t k = 0; k < sig.size(); ++k) {
        const auto& lit = tokens[sig[k]];
        if (!is_quoted_literal(lit)) continue;
        const bool match = sig_is(k + 1, TokenKind::op, U".") && sig_is(k + 2, TokenKind::identifier, U"split") &&
                           sig_is(k + 3, TokenKind::op, U"(") && empty_literal(k + 4) &&
                           sig_is(k + 5, TokenKind::op, U")") && sig_is(k + 6, TokenKind::op, U".") &&
                           sig_is(k + 7, TokenKind::identifier, U"reverse") && sig_is(k + 8, TokenKind::op, U"(") &&
                           sig_is(k + 9, TokenKind::op, U")") && sig_is(k + 10, TokenKind::op, U".") &&
                           sig_is(k + 11, TokenKind::identifier, U"join") && sig_is(k + 12, TokenKind::op, U"(") &&
                           empty_literal(k + 13) && sig_is(k + 14, TokenKind::op, U")");
        if (!match) continue;
        auto value = string_literal_value(lit.text);
        if (!value) continue;
        if (std::any_of(value->begin(), value->end(), is_combining_mark)) {
            r.flags.push_back({sig[k], "reversed literal contains combining marks"});
        }
        std::reverse(value->begin(), value->end());
        edits.push_back({{sig[k], sig[k + 14]}, make_token(TokenKind::string_literal,
                                                           encode_string_literal(*value, lit.text.front()))});
        ++r.changes;
        k += 14;
    }
    r.tokens = edits.empty() ? tokens : splice(tokens, edits);
    return r;
}

namespace {

bool operand_end(const Token& t) {
    switch (t.kind) {
    case TokenKind::identifier: case TokenKind::string_literal: case TokenKind::number_literal:
    case TokenKind::regex:
        return true;
    case TokenKind::keyword:
        return t.text == U"this" || t.text == U"super" || t.text == U"null" || t.text == U"true" ||
               t.text == U"false";
    default:
        return t.text == U")" || t.text == U"]" || t.text == U"}";
    }
}

/// True when the token before a literal binds no tighter than binary '+'.
bool safe_leading(const std::vector<Token>& tokens, const std::vector<std::size_t>& sig, std::size_t k) {
    if (k == 0) return true;
    const auto& prev = tokens[sig[k - 1]];
    if (prev.kind == TokenKind::keyword) {
        static const std::set<std::u32string> ok{U"return", U"case", U"throw", U"in", U"instanceof", U"else",
                                                 U"do", U"yield"};
        return ok.count(prev.text) != 0;
    }
    if (prev.kind != TokenKind::op && prev.kind != TokenKind::punctuation) return false;
    if (prev.text == U"+") return k >= 2 && operand_end(tokens[sig[k - 2]]);
    static const std::set<std::u32string> ok{
        U"(", U"[", U"{", U"}", U",", U";", U":", U"?", U"=", U"+=", U"-=", U"*=", U"/=", U"%=", U"**=",
        U"<<=", U">>=", U">>>=", U"&=", U"|=", U"^=", U"&&=", U"||=", U"?\?=", U"=>", U"&&", U"||", U"?\?",
        U"==", U"!=", U"===", U"!==", U"<", U">", U"<=", U">=", U"<<", U">>", U">>>", U"&", U"|", U"^",
    };
    return ok.count(prev.text) != 0;
}

/// True when the token after a literal does not bind it tighter than '+'.
bool safe_trailing(const std::vector<Token>& tokens, const std::vector<std::size_t>& sig, std::size_t k) {
    if (k + 1 >= sig.size()) return true;
    const auto& next = tokens[sig[k + 1]];
    if (next.kind == TokenKind::string_literal && next.text.front() == U'`') return false;
    static const std::set<std::u32string> bad{U".", U"?.", U"[", U"(", U"*", U"/", U"%", U"**", U"++", U"--"};
    return !bad.count(next.text) || next.kind == TokenKind::regex;
}

} // namespace

PassResult fold_concatenations(const std::vector<Token>& tokens) {
    PassResult r;
    const auto sig = significant(tokens);
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, Token>> edits;
    std::size_t k = 0;
    while (k < sig.size()) {
        if (!is_quoted_literal(tokens[sig[k]])) {
            ++k;
            continue;
        }
        // Collect a chain literal (+ literal)*.
        std::size_t last = k;
        while (last + 2 < sig.size() && tokens[sig[last + 1]].kind == TokenKind::op &&
               tokens[sig[last + 1]].text == U"+" && is_quoted_literal(tokens[sig[last + 2]])) {
            last += 2;
        }
        std::size_t first = k;
        if (!safe_leading(tokens, sig, first)) first += 2;
        if (!safe_trailing(tokens, sig, last) && last >= 2) last -= 2;
        if (first < last && last <= sig.size()) {
            std::vector<std::u32string> parts;
            bool ok = true;
            for (std::size_t j = first; j <= last; j += 2) {
                auto v = string_literal_value(tokens[sig[j]].text);
                if (!v) {
                    ok = false;
                    break;
                }
                parts.push_back(std::move(*v));
            }
            if (ok) {
                std::u32string value;
                for (const auto& p : parts) value = join_pairs(std::move(value), p);
                edits.push_back({{sig[first], sig[last]},
                                 make_token(TokenKind::string_literal,
                                            encode_string_literal(value, tokens[sig[first]].text.front()))});
                ++r.changes;
            }
        }
        k = std::max(k + 1, last + 1);
    }
    r.tokens = edits.empty() ? tokens : splice(tokens, edits);
    return r;
}

namespace {

struct BraceInfo {
    std::vector<std::size_t> depth;          ///< brace depth before each token
    std::vector<std::size_t> paren_depth;    ///< ( and [ depth before each token
    std::map<std::size_t, std::size_t> match; ///< open brace -> close brace (token indices)
    std::vector<std::ptrdiff_t> enclosing;   ///< innermost open '{' index, or -1
    std::vector<char32_t> innermost;         ///< innermost open bracket char, or 0
};

BraceInfo brace_info(const std::vector<Token>& tokens) {
    BraceInfo b;
    std::vector<std::size_t> braces;
    std::vector<std::pair<char32_t, std::size_t>> stack;
    std::size_t parens = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        b.depth.push_back(braces.size());
        b.paren_depth.push_back(parens);
        b.enclosing.push_back(braces.empty() ? -1 : static_cast<std::ptrdiff_t>(braces.back()));
        b.innermost.push_back(stack.empty() ? 0 : stack.back().first);
        if (t.kind != TokenKind::punctuation && t.kind != TokenKind::op) continue;
        if (t.text == U"{") {
            braces.push_back(i);
            stack.push_back({U'{', i});
        } else if (t.text == U"}") {
            if (!braces.empty()) {
                b.match[braces.back()] = i;
                braces.pop_back();
            }
            if (!stack.empty()) stack.pop_back();
        } else if (t.text == U"(" || t.text == U"[") {
            ++parens;
            stack.push_back({t.text[0], i});
        } else if (t.text == U")" || t.text == U"]") {
            if (parens) --parens;
            if (!stack.empty()) stack.pop_back();
        }
    }
    return b;
}

bool is_assignment_op(const Token& t) {
    static const std::set<std::u32string> ops{U"=", U"+=", U"-=", U"*=", U"/=", U"%=", U"**=", U"<<=",
                                              U">>=", U">>>=", U"&=", U"|=", U"^=", U"&&=", U"||=", U"?\?="};
    return t.kind == TokenKind::op && ops.count(t.text) != 0;
}

struct Candidate {
    std::size_t decl_name = 0; ///< token index of NAME in the declaration
    std::u32string literal;
};

} // namespace

PassResult propagate_constants(const std::vector<Token>& tokens) {
    PassResult r;
    const auto sig = significant(tokens);
    const auto braces = brace_info(tokens);
    auto tok = [&](std::size_t k) -> const Token& { return tokens[sig[k]]; };
    auto sig_text = [&](std::size_t k, std::u32string_view text) { return k < sig.size() && tok(k).text == text; };

    // Top-level `var|let|const NAME = "literal";` declarations.
    std::map<std::u32string, Candidate> candidates;
    std::set<std::u32string> rejected;
    std::map<std::u32string, std::size_t> top_level_decls;
    for (std::size_t k = 0; k + 1 < sig.size(); ++k) {
        const auto& kw = tok(k);
        if (kw.kind != TokenKind::keyword || (kw.text != U"var" && kw.text != U"let" && kw.text != U"const")) continue;
        if (tok(k + 1).kind != TokenKind::identifier) continue;
        const std::size_t i = sig[k + 1];
        if (braces.depth[i] != 0 || braces.paren_depth[i] != 0) continue;
        const auto& name = tok(k + 1).text;
        ++top_level_decls[name];
        const bool simple = sig_text(k + 2, U"=") && k + 3 < sig.size() && is_quoted_literal(tok(k + 3));
        bool terminated = k + 4 >= sig.size() || sig_text(k + 4, U";");
        if (!terminated && k + 4 < sig.size()) {
            // Automatic semicolon insertion after a line break.
            for (std::size_t j = sig[k + 3] + 1; j < sig[k + 4]; ++j) {
                if (std::any_of(tokens[j].text.begin(), tokens[j].text.end(), is_js_line_terminator)) terminated = true;
            }
        }
        if (simple && terminated && string_literal_value(tok(k + 3).text)) {
            candidates[name] = {sig[k + 1], tok(k + 3).text};
        } else {
            rejected.insert(name);
        }
    }
    for (const auto& [name, count] : top_level_decls) {
        if (count > 1) rejected.insert(name);
    }

    // Shadow regions per name: [open brace, close brace] token ranges.
    std::map<std::u32string, std::vector<std::pair<std::size_t, std::size_t>>> shadows;
    std::set<std::size_t> declarations;
    auto shadow_block = [&](const std::u32string& name, std::ptrdiff_t open) {
        if (open < 0) {
            rejected.insert(name);
            return;
        }
        auto it = braces.match.find(static_cast<std::size_t>(open));
        std::size_t close = it == braces.match.end() ? tokens.size() : it->second;
        shadows[name].push_back({static_cast<std::size_t>(open), close});
    };
    auto body_after = [&](std::size_t k_close_paren) -> std::ptrdiff_t {
        if (k_close_paren + 1 < sig.size() && sig_text(k_close_paren + 1, U"{")) {
            return static_cast<std::ptrdiff_t>(sig[k_close_paren + 1]);
        }
        return -1;
    };

    for (std::size_t k = 0; k < sig.size(); ++k) {
        const auto& t = tok(k);
        if (!candidates.count(t.text) || t.kind != TokenKind::identifier) continue;
        const std::size_t i = sig[k];
        if (i == candidates[t.text].decl_name) continue;
        const bool member = k > 0 && (tok(k - 1).text == U"." || tok(k - 1).text == U"?.");
        if (member) continue;
        const auto& name = t.text;

        // Nested declarations shadow the name.
        if (k > 0 && tok(k - 1).kind == TokenKind::keyword) {
            const auto& kw = tok(k - 1).text;
            if (kw == U"let" || kw == U"const" || kw == U"class") {
                shadow_block(name, braces.enclosing[i]);
                declarations.insert(i);
                continue;
            }
            if (kw == U"var") {
                rejected.insert(name); // function-scoped hoisting is out of reach
                continue;
            }
            if (kw == U"function") {
                shadow_block(name, braces.enclosing[i]);
                declarations.insert(i);
                continue;
            }
        }
        // Parameters: `function [id] ( ... NAME ... )` or `catch ( NAME )`.
        if (braces.paren_depth[i] > 0) {
            std::size_t open = k;
            int depth = 0;
            while (open > 0) {
                --open;
                if (tok(open).text == U")") ++depth;
                if (tok(open).text == U"(") {
                    if (depth == 0) break;
                    --depth;
                }
            }
            if (tok(open).text == U"(") {
                const bool fn = (open >= 1 && tok(open - 1).is(TokenKind::keyword, U"function")) ||
                                (open >= 2 && tok(open - 2).is(TokenKind::keyword, U"function")) ||
                                (open >= 1 && tok(open - 1).is(TokenKind::keyword, U"catch"));
                if (fn) {
                    std::size_t close = open;
                    int d = 0;
                    for (; close < sig.size(); ++close) {
                        if (tok(close).text == U"(") ++d;
                        if (tok(close).text == U")" && --d == 0) break;
                    }
                    if (close > k) {
                        shadow_block(name, body_after(close));
                        declarations.insert(i);
                        continue;
                    }
                }
            }
        }
        // Arrow parameters and assignment targets disqualify the name.
        if (sig_text(k + 1, U"=>")) {
            rejected.insert(name);
            continue;
        }
        if (k + 1 < sig.size() && (is_assignment_op(tok(k + 1)) || tok(k + 1).text == U"++" || tok(k + 1).text == U"--")) {
            rejected.insert(name);
            continue;
        }
        if (k > 0 && (tok(k - 1).text == U"++" || tok(k - 1).text == U"--")) {
            rejected.insert(name);
            continue;
        }
        if (k + 1 < sig.size() && (tok(k + 1).is(TokenKind::keyword, U"in") || tok(k + 1).text == U"of") &&
            k > 0 && (tok(k - 1).text == U"(" || tok(k - 1).kind == TokenKind::keyword)) {
            rejected.insert(name);
            continue;
        }
        // Destructuring targets are assignments too.
        if (k > 0 && (tok(k - 1).text == U"[" || tok(k - 1).text == U"{" || tok(k - 1).text == U",")) {
            std::size_t j = k + 1;
            int depth = 0;
            while (j < sig.size()) {
                const auto& x = tok(j).text;
                if (x == U"[" || x == U"{" || x == U"(") ++depth;
                else if (x == U"]" || x == U"}" || x == U")") {
                    if (depth == 0) break;
                    --depth;
                } else if (depth == 0 && x != U",") {
                    if (x != U":" && tok(j).kind != TokenKind::identifier) break;
                }
                ++j;
            }
            if (j + 1 < sig.size() && (tok(j).text == U"]" || tok(j).text == U"}") && sig_text(j + 1, U"=")) {
                rejected.insert(name);
                continue;
            }
        }
    }

    std::vector<std::pair<std::pair<std::size_t, std::size_t>, Token>> edits;
    for (std::size_t k = 0; k < sig.size(); ++k) {
        const auto& t = tok(k);
        if (t.kind != TokenKind::identifier) continue;
        auto c = candidates.find(t.text);
        if (c == candidates.end() || rejected.count(t.text)) continue;
        const std::size_t i = sig[k];
        if (i == c->second.decl_name || declarations.count(i)) continue;
        if (k > 0 && (tok(k - 1).text == U"." || tok(k - 1).text == U"?.")) continue;
        if (k > 0 && (tok(k - 1).is(TokenKind::keyword, U"break") || tok(k - 1).is(TokenKind::keyword, U"continue"))) continue;
        // Property keys, labels and object shorthand keep the identifier.
        const bool prev_sep = k == 0 || tok(k - 1).text == U"{" || tok(k - 1).text == U"," ||
                              tok(k - 1).text == U";" || tok(k - 1).text == U"}";
        if (sig_text(k + 1, U":") && prev_sep) continue;
        if (braces.innermost[i] == U'{' && k > 0 && (tok(k - 1).text == U"{" || tok(k - 1).text == U",") &&
            (sig_text(k + 1, U"}") || sig_text(k + 1, U","))) {
            continue;
        }
        bool shadowed = false;
        for (const auto& [open, close] : shadows[t.text]) {
            if (i > open && i < close) shadowed = true;
        }
        if (shadowed) continue;
        edits.push_back({{i, i}, make_token(TokenKind::string_literal, c->second.literal)});
        ++r.changes;
    }
    r.tokens = edits.empty() ? tokens : splice(tokens, edits);
    return r;
}

} // namespace casefile
