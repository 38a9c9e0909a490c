// casefile - offline artifact analysis workbench
// Lossless JavaScript tokenizer. Joining the token texts reproduces the input.

#pragma once

#include <casefile/engine/content.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace casefile {

enum class TokenKind {
    identifier,
    keyword,
    string_literal,
    number_literal,
    op,
    comment,
    whitespace,
    regex,
    punctuation,
};

const char* to_string(TokenKind kind) noexcept;

struct Token {
    TokenKind kind = TokenKind::whitespace;
    std::u32string text;
    std::size_t begin = 0; ///< code-point range in the tokenized text
    std::size_t end = 0;
    bool unterminated = false;

    bool is(TokenKind k, std::u32string_view t) const { return kind == k && text == t; }
    bool trivia() const noexcept { return kind == TokenKind::whitespace || kind == TokenKind::comment; }
};

std::vector<Token> tokenize_js(std::u32string_view source);
inline std::vector<Token> tokenize_js(const CanonicalText& text) { return tokenize_js(text.code_points); }

std::u32string join_tokens(const std::vector<Token>& tokens);

/// Rewrites begin/end so that ranges index the joined text.
void renumber(std::vector<Token>& tokens);

bool is_js_keyword(std::u32string_view word);
bool is_js_whitespace(char32_t c) noexcept;
bool is_js_line_terminator(char32_t c) noexcept;
bool is_identifier_start(char32_t c) noexcept;
bool is_identifier_part(char32_t c) noexcept;

} // namespace casefile
