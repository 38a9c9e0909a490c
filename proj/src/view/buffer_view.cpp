// casefile - offline artifact analysis workbench

#include <casefile/view/viewers.hpp>

#include <casefile/core/error.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace casefile {

const char* to_string(InferenceKind kind) noexcept {
    switch (kind) {
    case InferenceKind::ascii_string: return "ascii";
    case InferenceKind::utf16_string: return "utf16";
    case InferenceKind::float32: return "float32";
    case InferenceKind::float64: return "float64";
    case InferenceKind::int32: return "int32";
    case InferenceKind::int64: return "int64";
    }
    return "?";
}

namespace {

bool printable(std::uint8_t b) { return b >= 0x20 && b < 0x7F; }

template <typename F>
std::optional<std::string> shortest(F value) {
    if (std::isnan(value)) return std::nullopt;
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

} // namespace

std::vector<Inference> infer_at(ByteView data, std::uint64_t offset) {
    std::vector<Inference> out;
    if (offset >= data.size()) return out;

    std::size_t n = 0;
    while (offset + n < data.size() && printable(data[offset + n])) ++n;
    if (n >= min_inferred_string) {
        out.push_back({{offset, n}, InferenceKind::ascii_string,
                       std::string(as_chars(data.subspan(offset, n)))});
    }
    std::size_t units = 0;
    while (offset + units * 2 + 1 < data.size() && printable(data[offset + units * 2]) &&
           data[offset + units * 2 + 1] == 0) {
        ++units;
    }
    if (units >= min_inferred_string) {
        std::string s;
        for (std::size_t i = 0; i < units; ++i) s.push_back(static_cast<char>(data[offset + i * 2]));
        out.push_back({{offset, units * 2}, InferenceKind::utf16_string, std::move(s)});
    }

    if (in_bounds(data, offset, 4)) {
        const auto raw = load_le32(data, offset);
        out.push_back({{offset, 4}, InferenceKind::int32, std::to_string(static_cast<std::int32_t>(raw))});
        if (auto f = shortest(std::bit_cast<float>(raw))) out.push_back({{offset, 4}, InferenceKind::float32, *f});
    }
    if (in_bounds(data, offset, 8)) {
        const auto raw = load_le64(data, offset);
        out.push_back({{offset, 8}, InferenceKind::int64, std::to_string(static_cast<std::int64_t>(raw))});
        if (auto f = shortest(std::bit_cast<double>(raw))) out.push_back({{offset, 8}, InferenceKind::float64, *f});
    }
    return out;
}

std::size_t line_count(ByteView data, std::size_t bytes_per_line) {
    if (bytes_per_line == 0) throw Error(Errc::invalid_argument, "bytes per line must be positive");
    return (data.size() + bytes_per_line - 1) / bytes_per_line;
}

std::vector<std::string> render_buffer_view(ByteView data, const BufferViewModel& model, std::size_t first_line,
                                            std::size_t count) {
    const auto bpl = model.bytes_per_line;
    const auto total = line_count(data, bpl);
    if (first_line > total || count > total - first_line) {
        throw Error(Errc::out_of_bounds, "line range exceeds " + std::to_string(total) + " lines");
    }
    for (const auto& z : model.zones) {
        if (!z.range.within(data.size())) throw Error(Errc::out_of_bounds, "zone " + z.label + " exceeds buffer");
    }
    std::vector<std::string> lines;
    lines.reserve(count);
    for (std::size_t l = first_line; l < first_line + count; ++l) {
        const std::uint64_t start = std::uint64_t{l} * bpl;
        const auto n = std::min<std::uint64_t>(bpl, data.size() - start);
        char head[24];
        std::snprintf(head, sizeof head, "%08llx  ", static_cast<unsigned long long>(start));
        std::string line = head;
        std::string glyphs;
        for (std::size_t i = 0; i < bpl; ++i) {
            if (i) line.push_back(' ');
            if (i < n) {
                const auto b = data[start + i];
                static constexpr char digits[] = "0123456789ABCDEF";
                line.push_back(digits[b >> 4]);
                line.push_back(digits[b & 15]);
                glyphs.push_back(printable(b) ? static_cast<char>(b) : '.');
            } else {
                line += "  ";
            }
        }
        line += "  |" + glyphs + "|";
        const ByteRange here{start, n};
        for (const auto& z : model.zones) {
            const auto lo = std::max(z.range.offset, here.offset);
            const auto hi = std::min(z.range.end(), here.end());
            if (lo >= hi) continue;
            char span[64];
            std::snprintf(span, sizeof span, "@%llx-%llx", static_cast<unsigned long long>(lo),
                          static_cast<unsigned long long>(hi));
            line += "  {" + z.style + ":" + z.label + span + "}";
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

std::vector<std::string> render_buffer_view(ByteView data, const BufferViewModel& model) {
    return render_buffer_view(data, model, 0, line_count(data, model.bytes_per_line));
}

Bytes parse_hex_lines(const std::vector<std::string>& lines) {
    Bytes out;
    for (const auto& line : lines) {
        const auto begin = line.find("  ");
        const auto end = line.find("  |", begin + 2);
        if (begin == std::string::npos || end == std::string::npos) {
            throw Error(Errc::bad_format, "not a hex view line: " + line);
        }
        const auto hex = std::string_view(line).substr(begin + 2, end - begin - 2);
        for (std::size_t i = 0; i + 1 < hex.size() + 1; i += 3) {
            if (hex[i] == ' ') continue;
            unsigned v = 0;
            auto r = std::from_chars(hex.data() + i, hex.data() + i + 2, v, 16);
            if (r.ec != std::errc()) throw Error(Errc::bad_format, "bad hex byte in: " + line);
            out.push_back(static_cast<std::uint8_t>(v));
        }
    }
    return out;
}

std::vector<std::string> render_table(const std::vector<std::string>& header,
                                      const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    auto fmt = [&](const std::vector<std::string>& r) {
        std::string line;
        for (std::size_t c = 0; c < width.size(); ++c) {
            const std::string cell = c < r.size() ? r[c] : std::string();
            line += cell;
            if (c + 1 < width.size()) line += std::string(width[c] - cell.size() + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        return line;
    };
    std::vector<std::string> out{fmt(header)};
    for (const auto& r : rows) out.push_back(fmt(r));
    return out;
}

SelectionUpdate sync_selection(const SelectionState& state, ByteRange range, const std::string& origin) {
    if (!range.within(state.buffer_length)) {
        throw Error(Errc::out_of_bounds, "selection " + to_string(range) + " exceeds " +
                                             std::to_string(state.buffer_length) + "-byte buffer");
    }
    SelectionUpdate u{state, {}};
    u.state.active = range;
    u.state.cursor = range.offset;
    for (const auto& s : state.subscribers) {
        if (s != origin) u.notified.push_back(s);
    }
    return u;
}

} // namespace casefile
