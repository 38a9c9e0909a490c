// casefile - offline artifact analysis workbench
// Token-level JavaScript deobfuscation passes and the fixpoint driver

#pragma once

#include <casefile/text/js_lexer.hpp>

#include <optional>
#include <string>
#include <vector>

namespace casefile {

struct PassFlag {
    std::size_t token = 0; ///< index into the pass input
    std::string message;
};

struct PassResult {
    std::vector<Token> tokens;
    std::size_t changes = 0;
    std::vector<PassFlag> flags;
};

PassResult remove_comments(const std::vector<Token>& tokens);
PassResult unescape_literals(const std::vector<Token>& tokens);
PassResult apply_reverse(const std::vector<Token>& tokens);
PassResult fold_concatenations(const std::vector<Token>& tokens);
PassResult propagate_constants(const std::vector<Token>& tokens);

struct TransformStep {
    std::string pass;
    std::size_t changes = 0;
    std::size_t iteration = 0; ///< 1-based
};

struct TransformLog {
    std::vector<TransformStep> steps; ///< only passes that changed something
    std::size_t iterations = 0;        ///< includes the final zero-change round
    bool truncated = false;            ///< stopped by the iteration limit
    std::vector<std::string> flags;

    bool fired(std::string_view pass) const;
};

struct DeobfuscationResult {
    std::vector<Token> tokens;
    TransformLog log;

    std::u32string text() const { return join_tokens(tokens); }
};

inline constexpr std::size_t default_max_iterations = 16;

/// Pass names in application order.
const std::vector<std::string>& deobfuscation_passes();

/// Runs one named pass; throws not_found for unknown names.
PassResult run_pass(std::string_view name, const std::vector<Token>& tokens);

DeobfuscationResult deobfuscate_fixpoint(std::vector<Token> tokens,
                                         std::size_t max_iterations = default_max_iterations);

/// Decoded value of a quoted (non-template) string literal, or nullopt when
/// the literal is a template, unterminated or has a malformed escape.
std::optional<std::u32string> string_literal_value(std::u32string_view literal);

/// Canonical literal text for a value using the given quote character.
std::u32string encode_string_literal(std::u32string_view value, char32_t quote = U'"');

} // namespace casefile
