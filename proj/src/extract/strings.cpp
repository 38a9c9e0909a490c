// casefile - offline artifact analysis workbench

#include <casefile/extract/strings.hpp>

#include <algorithm>

namespace casefile {

const char* to_string(StringEncoding encoding) noexcept {
    return encoding == StringEncoding::ascii ? "ascii" : "utf16le";
}

bool is_printable_string_byte(std::uint8_t b) noexcept {
    return (b >= 0x20 && b < 0x7F) || b == '\t';
}

std::vector<LocatedString> extract_strings(ByteView data, std::size_t min_length) {
    if (min_length == 0) throw Error(Errc::invalid_argument, "minimum string length must be at least 1");
    std::vector<LocatedString> out;

    std::size_t start = 0;
    std::string run;
    auto flush_ascii = [&](std::size_t end) {
        if (run.size() >= min_length) {
            out.push_back({run, StringEncoding::ascii, start, end - start});
        }
        run.clear();
    };
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (is_printable_string_byte(data[i])) {
            if (run.empty()) start = i;
            run.push_back(static_cast<char>(data[i]));
        } else {
            flush_ascii(i);
        }
    }
    flush_ascii(data.size());

    for (std::size_t align = 0; align < 2; ++align) {
        run.clear();
        std::size_t i = align;
        for (; i + 1 < data.size(); i += 2) {
            if (data[i + 1] == 0 && is_printable_string_byte(data[i])) {
                if (run.empty()) start = i;
                run.push_back(static_cast<char>(data[i]));
                continue;
            }
            if (run.size() >= min_length) {
                out.push_back({run, StringEncoding::utf16le, start, i - start});
            }
            run.clear();
        }
        if (run.size() >= min_length) out.push_back({run, StringEncoding::utf16le, start, i - start});
    }

    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.offset != b.offset ? a.offset < b.offset : a.encoding < b.encoding;
    });
    return out;
}

} // namespace casefile
