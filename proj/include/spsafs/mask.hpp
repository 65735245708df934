#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spsafs/dataset.hpp"
#include "spsafs/random.hpp"

namespace spsafs {

// One bit per feature; 1 keeps the feature.
using FeatureMask = std::vector<std::uint8_t>;

inline std::size_t selected_count(const FeatureMask& mask) {
    std::size_t n = 0;
    for (auto b : mask) n += b ? 1 : 0;
    return n;
}

inline bool any_selected(const FeatureMask& mask) {
    for (auto b : mask)
        if (b) return true;
    return false;
}

inline std::vector<std::size_t> selected_indices(const FeatureMask& mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) idx.push_back(i);
    return idx;
}

inline std::string mask_to_string(const FeatureMask& mask) {
    std::string s(mask.size(), '0');
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) s[i] = '1';
    return s;
}

inline FeatureMask full_mask(std::size_t p) { return FeatureMask(p, 1); }

inline FeatureMask random_mask(std::size_t p, RandomStream& rng) {
    FeatureMask m(p);
    for (auto& b : m) b = rng.next_bernoulli(0.5) ? 1 : 0;
    return m;
}

inline std::uint64_t mask_hash(const FeatureMask& mask) {
    std::uint64_t h = mix64(mask.size());
    for (std::size_t i = 0; i < mask.size(); i += 64) {
        std::uint64_t word = 0;
        for (std::size_t j = i; j < mask.size() && j < i + 64; ++j)
            word = (word << 1) | (mask[j] ? 1u : 0u);
        h = hash_combine(h, word);
    }
    return h;
}

// Copy the selected columns of the given rows into a dense matrix.
inline std::vector<double> gather_columns(MatrixView m,
                                          const std::vector<std::size_t>& rows,
                                          const std::vector<std::size_t>& cols) {
    std::vector<double> out;
    out.reserve(rows.size() * cols.size());
    for (std::size_t r : rows) {
        const double* src = m.row(r);
        for (std::size_t c : cols) out.push_back(src[c]);
    }
    return out;
}

}  // namespace spsafs
