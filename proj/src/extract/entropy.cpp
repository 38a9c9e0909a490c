// casefile - offline artifact analysis workbench

#include <casefile/extract/entropy.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace casefile {

double shannon_entropy(ByteView data) {
    if (data.empty()) return 0.0;
    std::array<std::size_t, 256> freq{};
    for (auto b : data) ++freq[b];
    const double size = static_cast<double>(data.size());
    double h = 0.0;
    for (auto count : freq) {
        if (count == 0) continue;
        double p = static_cast<double>(count) / size;
        h -= p * std::log2(p);
    }
    // -0.0 and rounding noise past the bounds
    return std::clamp(h, 0.0, max_entropy) + 0.0;
}

EntropyProfile entropy_profile(ByteView data, std::size_t block_size) {
    if (block_size == 0) throw Error(Errc::invalid_argument, "entropy block size must be at least 1");
    EntropyProfile p;
    p.block_size = block_size;
    p.blocks.reserve((data.size() + block_size - 1) / block_size);
    for (std::size_t off = 0; off < data.size(); off += block_size) {
        p.blocks.push_back(shannon_entropy(data.subspan(off, std::min(block_size, data.size() - off))));
    }
    p.overall = shannon_entropy(data);
    return p;
}

} // namespace casefile
