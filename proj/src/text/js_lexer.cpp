// casefile - offline artifact analysis workbench

#include <casefile/text/js_lexer.hpp>

#include <algorithm>
#include <array>

namespace casefile {

const char* to_string(TokenKind kind) noexcept {
    switch (kind) {
    case TokenKind::identifier: return "Identifier";
    case TokenKind::keyword: return "Keyword";
    case TokenKind::string_literal: return "StringLiteral";
    case TokenKind::number_literal: return "NumberLiteral";
    case TokenKind::op: return "Operator";
    case TokenKind::comment: return "Comment";
    case TokenKind::whitespace: return "Whitespace";
    case TokenKind::regex: return "Regex";
    case TokenKind::punctuation: return "Punctuation";
    }
    return "?";
}

bool is_js_line_terminator(char32_t c) noexcept {
    return c == U'\n' || c == U'\r' || c == 0x2028 || c == 0x2029;
}

bool is_js_whitespace(char32_t c) noexcept {
    switch (c) {
    case U' ': case U'\t': case 0x0B: case 0x0C: case 0xA0: case 0xFEFF: case 0x1680:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return (c >= 0x2000 && c <= 0x200A) || is_js_line_terminator(c);
    }
}

bool is_identifier_start(char32_t c) noexcept {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c == U'$' || c == U'_' ||
           (c >= 0x80 && !is_js_whitespace(c) && c != 0xFFFD);
}

bool is_identifier_part(char32_t c) noexcept {
    return is_identifier_start(c) || (c >= U'0' && c <= U'9') || c == 0x200C || c == 0x200D;
}

bool is_js_keyword(std::u32string_view w) {
    static constexpr std::array<std::u32string_view, 47> words{
        U"await",  U"break",   U"case",     U"catch",      U"class",     U"const",   U"continue",
        U"debugger", U"default", U"delete", U"do",         U"else",      U"enum",    U"export",
        U"extends", U"false",  U"finally",  U"for",        U"function",  U"if",      U"implements",
        U"import", U"in",      U"instanceof", U"interface", U"let",      U"new",     U"null",
        U"package", U"private", U"protected", U"public",   U"return",    U"static",  U"super",
        U"switch", U"this",    U"throw",    U"true",       U"try",       U"typeof",  U"var",
        U"void",   U"while",   U"with",     U"yield",      U"async",
    };
    return std::find(words.begin(), words.end(), w) != words.end();
}

namespace {

constexpr std::array<std::u32string_view, 52> operators{
    U">>>=", U"...", U"===", U"!==", U"**=", U"<<=", U">>=", U">>>", U"&&=", U"||=", U"?\?=",
    U"=>",   U"==",  U"!=",  U"<=",  U">=",  U"&&",  U"||",  U"?\?",  U"?.",  U"++",  U"--",
    U"+=",   U"-=",  U"*=",  U"/=",  U"%=",  U"&=",  U"|=",  U"^=",  U"**",  U"<<",  U">>",
    U"+",    U"-",   U"*",   U"/",   U"%",   U"&",   U"|",   U"^",   U"!",   U"~",   U"<",
    U">",    U"=",   U"?",   U":",   U"(",   U")",   U"[",   U"]",
};

constexpr std::u32string_view punctuators = U"()[]{};,.";

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_hex(char32_t c) { return is_digit(c) || (c >= U'a' && c <= U'f') || (c >= U'A' && c <= U'F'); }

class Lexer {
public:
    explicit Lexer(std::u32string_view src) : src_(src) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) next();
        return std::move(out_);
    }

private:
    char32_t at(std::size_t i) const { return i < src_.size() ? src_[i] : 0; }

    void emit(TokenKind kind, std::size_t end, bool unterminated = false) {
        Token t;
        t.kind = kind;
        t.begin = pos_;
        t.end = end;
        t.text.assign(src_.substr(pos_, end - pos_));
        t.unterminated = unterminated;
        track_parens(t);
        if (!t.trivia()) last_ = out_.size();
        out_.push_back(std::move(t));
        pos_ = end;
    }

    // A ")" closing the condition of if/while/for/with starts a statement.
    void track_parens(const Token& t) {
        if (t.kind != TokenKind::punctuation) return;
        if (t.text == U"(") {
            const Token* prev = last_significant();
            parens_.push_back(prev && prev->kind == TokenKind::keyword &&
                              (prev->text == U"if" || prev->text == U"while" || prev->text == U"for" ||
                               prev->text == U"with"));
        } else if (t.text == U")") {
            closes_condition_ = !parens_.empty() && parens_.back();
            if (!parens_.empty()) parens_.pop_back();
        }
    }

    const Token* last_significant() const { return last_ == npos ? nullptr : &out_[last_]; }

    bool regex_allowed() const {
        const Token* t = last_significant();
        if (!t) return true;
        switch (t->kind) {
        case TokenKind::identifier:
        case TokenKind::number_literal:
        case TokenKind::string_literal:
        case TokenKind::regex:
            return false;
        case TokenKind::keyword:
            return !(t->text == U"this" || t->text == U"super" || t->text == U"null" ||
                     t->text == U"true" || t->text == U"false");
        case TokenKind::punctuation:
            if (t->text == U")") return closes_condition_;
            return t->text != U"]";
        case TokenKind::op:
            return !(t->text == U"++" || t->text == U"--" || t->text == U")" || t->text == U"]");
        default:
            return true;
        }
    }

    void next() {
        const char32_t c = src_[pos_];
        if (is_js_whitespace(c)) {
            std::size_t e = pos_;
            while (e < src_.size() && is_js_whitespace(src_[e])) ++e;
            return emit(TokenKind::whitespace, e);
        }
        if (c == U'/' && at(pos_ + 1) == U'/') {
            std::size_t e = pos_ + 2;
            while (e < src_.size() && !is_js_line_terminator(src_[e])) ++e;
            return emit(TokenKind::comment, e);
        }
        if (c == U'/' && at(pos_ + 1) == U'*') {
            auto close = src_.find(U"*/", pos_ + 2);
            if (close == std::u32string_view::npos) return emit(TokenKind::comment, src_.size(), true);
            return emit(TokenKind::comment, close + 2);
        }
        if (c == U'\'' || c == U'"') return string_literal(c);
        if (c == U'`') {
            bool ok = true;
            auto e = scan_template(pos_, ok);
            return emit(TokenKind::string_literal, e, !ok);
        }
        if (is_digit(c) || (c == U'.' && is_digit(at(pos_ + 1)))) return number();
        if (is_identifier_start(c) || (c == U'\\' && at(pos_ + 1) == U'u') ||
            (c == U'#' && is_identifier_start(at(pos_ + 1)))) {
            return identifier();
        }
        if (c == U'/' && regex_allowed()) {
            if (auto e = scan_regex(); e != npos) return emit(TokenKind::regex, e);
        }
        if (c == U'?' && at(pos_ + 1) == U'.' && is_digit(at(pos_ + 2))) return emit(TokenKind::op, pos_ + 1);
        for (auto op : operators) {
            if (op.size() == 1 && punctuators.find(op[0]) != std::u32string_view::npos) continue;
            if (src_.substr(pos_, op.size()) == op) return emit(TokenKind::op, pos_ + op.size());
        }
        return emit(TokenKind::punctuation, pos_ + 1);
    }

    void string_literal(char32_t quote) {
        std::size_t e = pos_ + 1;
        while (e < src_.size()) {
            char32_t c = src_[e];
            if (c == quote) return emit(TokenKind::string_literal, e + 1);
            if (c == U'\\') {
                if (at(e + 1) == U'\r' && at(e + 2) == U'\n') e += 3;
                else e += 2;
                continue;
            }
            if (c == U'\n' || c == U'\r') break; // raw newline ends an unterminated literal
            ++e;
        }
        emit(TokenKind::string_literal, std::min(e, src_.size()), true);
    }

    std::size_t scan_template(std::size_t start, bool& ok) const {
        std::size_t e = start + 1;
        while (e < src_.size()) {
            char32_t c = src_[e];
            if (c == U'`') return e + 1;
            if (c == U'\\') { e += 2; continue; }
            if (c == U'$' && at(e + 1) == U'{') {
                e = scan_substitution(e + 2, ok);
                if (!ok) return src_.size();
                continue;
            }
            ++e;
        }
        ok = false;
        return src_.size();
    }

    // Returns the position after the closing brace of a ${...} substitution.
    std::size_t scan_substitution(std::size_t e, bool& ok) const {
        int depth = 1;
        while (e < src_.size()) {
            char32_t c = src_[e];
            if (c == U'\'' || c == U'"') {
                ++e;
                while (e < src_.size() && src_[e] != c && !is_js_line_terminator(src_[e])) e += src_[e] == U'\\' ? 2 : 1;
                ++e;
            } else if (c == U'`') {
                e = scan_template(e, ok);
                if (!ok) return src_.size();
            } else if (c == U'/' && at(e + 1) == U'*') {
                auto close = src_.find(U"*/", e + 2);
                e = close == std::u32string_view::npos ? src_.size() : close + 2;
            } else if (c == U'/' && at(e + 1) == U'/') {
                while (e < src_.size() && !is_js_line_terminator(src_[e])) ++e;
            } else if (c == U'{') {
                ++depth;
                ++e;
            } else if (c == U'}') {
                if (--depth == 0) return e + 1;
                ++e;
            } else {
                ++e;
            }
        }
        ok = false;
        return src_.size();
    }

    std::size_t scan_regex() const {
        std::size_t e = pos_ + 1;
        bool in_class = false;
        if (at(e) == U'*' || at(e) == U'/') return npos;
        while (e < src_.size()) {
            char32_t c = src_[e];
            if (is_js_line_terminator(c)) return npos;
            if (c == U'\\') { e += 2; continue; }
            if (c == U'[') in_class = true;
            else if (c == U']') in_class = false;
            else if (c == U'/' && !in_class) {
                ++e;
                while (e < src_.size() && is_identifier_part(src_[e])) ++e;
                return e;
            }
            ++e;
        }
        return npos;
    }

    void number() {
        std::size_t e = pos_;
        if (src_[e] == U'0' && (at(e + 1) == U'x' || at(e + 1) == U'X' || at(e + 1) == U'o' ||
                                at(e + 1) == U'O' || at(e + 1) == U'b' || at(e + 1) == U'B')) {
            e += 2;
            while (e < src_.size() && (is_hex(src_[e]) || src_[e] == U'_')) ++e;
        } else {
            while (e < src_.size() && (is_digit(src_[e]) || src_[e] == U'_')) ++e;
            if (at(e) == U'.') {
                ++e;
                while (e < src_.size() && (is_digit(src_[e]) || src_[e] == U'_')) ++e;
            }
            if ((at(e) == U'e' || at(e) == U'E') &&
                (is_digit(at(e + 1)) || ((at(e + 1) == U'+' || at(e + 1) == U'-') && is_digit(at(e + 2))))) {
                e += 2;
                while (e < src_.size() && is_digit(src_[e])) ++e;
            }
        }
        if (at(e) == U'n') ++e;
        emit(TokenKind::number_literal, e);
    }

    void identifier() {
        std::size_t e = pos_;
        if (src_[e] == U'#') ++e;
        while (e < src_.size()) {
            if (src_[e] == U'\\' && at(e + 1) == U'u') {
                e += 2;
                if (at(e) == U'{') {
                    while (e < src_.size() && src_[e] != U'}') ++e;
                    if (e < src_.size()) ++e;
                } else {
                    for (int k = 0; k < 4 && e < src_.size() && is_hex(src_[e]); ++k) ++e;
                }
                continue;
            }
            if (!is_identifier_part(src_[e])) break;
            ++e;
        }
        auto word = src_.substr(pos_, e - pos_);
        // property names after '.' are never keywords
        const Token* prev = last_significant();
        bool member = prev && (prev->text == U"." || prev->text == U"?.");
        emit(!member && is_js_keyword(word) ? TokenKind::keyword : TokenKind::identifier, e);
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::u32string_view src_;
    std::size_t pos_ = 0;
    std::vector<Token> out_;
    std::size_t last_ = npos;
    std::vector<bool> parens_; ///< per open "(": follows if/while/for/with
    bool closes_condition_ = false;
};

} // namespace

std::vector<Token> tokenize_js(std::u32string_view source) { return Lexer(source).run(); }

std::u32string join_tokens(const std::vector<Token>& tokens) {
    std::u32string out;
    for (const auto& t : tokens) out += t.text;
    return out;
}

void renumber(std::vector<Token>& tokens) {
    std::size_t pos = 0;
    for (auto& t : tokens) {
        t.begin = pos;
        pos += t.text.size();
        t.end = pos;
    }
}

} // namespace casefile
