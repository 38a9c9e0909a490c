// casefile - offline artifact analysis workbench
// Small code-point helpers used by the text pipeline

#pragma once

#include <string>
#include <string_view>

namespace casefile {

inline constexpr char32_t replacement_char = U'�';

inline bool is_surrogate(char32_t cp) noexcept { return cp >= 0xD800 && cp <= 0xDFFF; }

void append_utf8(std::string& out, char32_t cp);
std::string to_utf8(std::u32string_view text);

/// Lenient UTF-8 decode: invalid bytes become U+FFFD.
std::u32string from_utf8(std::string_view text);

/// Combining marks that make code-point reversal visually lossy.
bool is_combining_mark(char32_t cp) noexcept;

} // namespace casefile
