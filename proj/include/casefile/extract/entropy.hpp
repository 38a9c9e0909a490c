// casefile - offline artifact analysis workbench
// Shannon entropy over byte-value frequencies

#pragma once

#include <casefile/core/bytes.hpp>

#include <vector>

namespace casefile {

inline constexpr double max_entropy = 8.0;
inline constexpr double packed_entropy_threshold = 7.5;

/// Bits per byte, in [0, 8]. Empty input is 0.
double shannon_entropy(ByteView data);

struct EntropyProfile {
    std::size_t block_size = 0;
    std::vector<double> blocks; ///< ceil(length / block_size) values
    double overall = 0.0;
};

EntropyProfile entropy_profile(ByteView data, std::size_t block_size);

} // namespace casefile
