// casefile - offline artifact analysis workbench
// Text format detection (JS, JSON, INI, CSV) by extension, then heuristics

#pragma once

#include <casefile/engine/identification.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace casefile {

/// Tag implied by a file extension, if any ("js" -> JS, "csv" -> CSV, ...).
std::optional<std::string> text_tag_for_extension(std::string_view name_hint);

bool looks_like_json(std::string_view text);
bool looks_like_ini(std::string_view text);
/// Delimiter (',' '\t' ';') if the first 10 lines agree on a column count >= 2.
std::optional<char> csv_delimiter(std::string_view text);
bool looks_like_js(std::string_view text);

/// Extension first, then JSON, INI, CSV, JS heuristics; TEXT otherwise.
TypeIdentification detect_text_type(std::string_view utf8_text, std::string_view name_hint);

} // namespace casefile
