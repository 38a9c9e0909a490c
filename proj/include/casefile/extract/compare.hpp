// casefile - offline artifact analysis workbench

#pragma once

#include <casefile/core/bytes.hpp>

#include <vector>

namespace casefile {

enum class DiffKind {
    changed,   ///< bytes differ at the same position
    only_in_a, ///< trailing bytes present only in the first buffer
    only_in_b, ///< trailing bytes present only in the second buffer
};

const char* to_string(DiffKind kind) noexcept;

struct DiffRange {
    std::uint64_t offset_a = 0;
    std::uint64_t offset_b = 0;
    std::uint64_t length = 0;
    DiffKind kind = DiffKind::changed;

    friend bool operator==(const DiffRange&, const DiffRange&) = default;
};

/// Positional comparison: maximal differing runs over the common prefix,
/// then one tail range for the length difference. Sorted and disjoint.
std::vector<DiffRange> binary_compare(ByteView a, ByteView b);

} // namespace casefile
