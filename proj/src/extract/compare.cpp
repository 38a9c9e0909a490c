// casefile - offline artifact analysis workbench

#include <casefile/extract/compare.hpp>

#include <algorithm>

namespace casefile {

const char* to_string(DiffKind kind) noexcept {
    switch (kind) {
    case DiffKind::changed: return "changed";
    case DiffKind::only_in_a: return "only-in-a";
    case DiffKind::only_in_b: return "only-in-b";
    }
    return "?";
}

std::vector<DiffRange> binary_compare(ByteView a, ByteView b) {
    std::vector<DiffRange> out;
    const std::size_t common = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < common) {
        if (a[i] == b[i]) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < common && a[i] != b[i]) ++i;
        out.push_back({start, start, i - start, DiffKind::changed});
    }
    if (a.size() > common) out.push_back({common, common, a.size() - common, DiffKind::only_in_a});
    if (b.size() > common) out.push_back({common, common, b.size() - common, DiffKind::only_in_b});
    return out;
}

} // namespace casefile
