// casefile - offline artifact analysis workbench

#include <casefile/deobf/deobfuscate.hpp>

#include <casefile/core/unicode.hpp>

namespace casefile {

namespace {

int hex_value(char32_t c) {
    if (c >= U'0' && c <= U'9') return static_cast<int>(c - U'0');
    if (c >= U'a' && c <= U'f') return static_cast<int>(c - U'a' + 10);
    if (c >= U'A' && c <= U'F') return static_cast<int>(c - U'A' + 10);
    return -1;
}

bool read_hex(std::u32string_view s, std::size_t& i, std::size_t digits, char32_t& out) {
    if (i + digits > s.size()) return false;
    char32_t v = 0;
    for (std::size_t k = 0; k < digits; ++k) {
        int h = hex_value(s[i + k]);
        if (h < 0) return false;
        v = v * 16 + static_cast<char32_t>(h);
    }
    i += digits;
    out = v;
    return true;
}

void append_hex(std::u32string& out, char32_t prefix, unsigned value, int digits) {
    static constexpr char hex[] = "0123456789abcdef";
    out += U'\\';
    out += prefix;
    for (int k = digits - 1; k >= 0; --k) out += static_cast<char32_t>(hex[(value >> (4 * k)) & 0xF]);
}

} // namespace

std::optional<std::u32string> string_literal_value(std::u32string_view lit) {
    if (lit.size() < 2) return std::nullopt;
    const char32_t q = lit.front();
    if ((q != U'"' && q != U'\'') || lit.back() != q) return std::nullopt;
    const auto body = lit.substr(1, lit.size() - 2);
    std::u32string out;
    for (std::size_t i = 0; i < body.size();) {
        char32_t c = body[i];
        if (c == q || c == U'\n' || c == U'\r') return std::nullopt;
        if (c != U'\\') {
            out += c;
            ++i;
            continue;
        }
        if (++i >= body.size()) return std::nullopt;
        c = body[i++];
        switch (c) {
        case U'n': out += U'\n'; break;
        case U't': out += U'\t'; break;
        case U'r': out += U'\r'; break;
        case U'b': out += U'\b'; break;
        case U'f': out += U'\f'; break;
        case U'v': out += U'\v'; break;
        case U'\r':
            if (i < body.size() && body[i] == U'\n') ++i;
            break;
        case U'\n': case 0x2028: case 0x2029:
            break;
        case U'x': {
            char32_t v;
            if (!read_hex(body, i, 2, v)) return std::nullopt;
            out += v;
            break;
        }
        case U'u': {
            char32_t v = 0;
            if (i < body.size() && body[i] == U'{') {
                auto close = body.find(U'}', i);
                if (close == std::u32string_view::npos || close == i + 1 || close - i - 1 > 6) return std::nullopt;
                ++i;
                if (!read_hex(body, i, close - i, v) || v > 0x10FFFF) return std::nullopt;
                ++i;
            } else if (!read_hex(body, i, 4, v)) {
                return std::nullopt;
            }
            // Join an escaped surrogate pair into one code point.
            if (v >= 0xDC00 && v <= 0xDFFF && !out.empty() && out.back() >= 0xD800 && out.back() <= 0xDBFF) {
                out.back() = 0x10000 + ((out.back() - 0xD800) << 10) + (v - 0xDC00);
            } else {
                out += v;
            }
            break;
        }
        default:
            if (c >= U'0' && c <= U'7') {
                unsigned v = static_cast<unsigned>(c - U'0');
                const std::size_t max_digits = c <= U'3' ? 2 : 1;
                for (std::size_t k = 0; k < max_digits && i < body.size() && body[i] >= U'0' && body[i] <= U'7'; ++k) {
                    v = v * 8 + static_cast<unsigned>(body[i++] - U'0');
                }
                out += static_cast<char32_t>(v);
            } else {
                out += c; // identity escape, including \8 \9 and quotes
            }
        }
    }
    return out;
}

std::u32string encode_string_literal(std::u32string_view value, char32_t quote) {
    std::u32string out;
    out += quote;
    for (char32_t c : value) {
        switch (c) {
        case U'\\': out += U"\\\\"; break;
        case U'\n': out += U"\\n"; break;
        case U'\r': out += U"\\r"; break;
        case U'\t': out += U"\\t"; break;
        case U'\b': out += U"\\b"; break;
        case U'\f': out += U"\\f"; break;
        case U'\v': out += U"\\v"; break;
        default:
            if (c == quote) {
                out += U'\\';
                out += c;
            } else if (c < 0x20 || c == 0x7F) {
                append_hex(out, U'x', static_cast<unsigned>(c), 2);
            } else if (c == 0x2028 || c == 0x2029 || is_surrogate(c)) {
                append_hex(out, U'u', static_cast<unsigned>(c), 4);
            } else {
                out += c;
            }
        }
    }
    out += quote;
    return out;
}

} // namespace casefile
