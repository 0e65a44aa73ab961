#ifndef TORUSNS_MULTI_INDEX_HPP
#define TORUSNS_MULTI_INDEX_HPP

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace torusns {

// Increasing multi-indices I = {i_1 < ... < i_p} subset of {0,..,n-1} are
// represented as bitmasks. Components of a degree-p form are stored on these
// indices only, in lexicographic order of the index tuple.

using IndexMask = uint32_t;

inline int mask_degree(IndexMask m) { return std::popcount(m); }

/// All degree-p multi-indices over n axes, lexicographic order of the tuples.
inline std::vector<IndexMask> degree_masks(int n, int p) {
    if (p < 0 || p > n) throw std::invalid_argument("degree_masks: degree out of range");
    std::vector<IndexMask> out;
    std::vector<int> c(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) c[static_cast<size_t>(j)] = j;
    while (true) {
        IndexMask m = 0;
        for (int j : c) m |= (IndexMask{1} << j);
        out.push_back(m);
        if (p == 0) break;
        int j = p - 1;
        while (j >= 0 && c[static_cast<size_t>(j)] == n - p + j) --j;
        if (j < 0) break;
        ++c[static_cast<size_t>(j)];
        for (int l = j + 1; l < p; ++l) c[static_cast<size_t>(l)] = c[static_cast<size_t>(l - 1)] + 1;
    }
    return out;
}

inline int binomial(int n, int p) {
    if (p < 0 || p > n) return 0;
    long r = 1;
    for (int j = 1; j <= p; ++j) r = r * (n - p + j) / j;
    return static_cast<int>(r);
}

/// Sign of dx^I ^ dx^J as a multiple of dx^{I|J}; zero if I, J intersect.
inline int wedge_sign(IndexMask mi, IndexMask mj) {
    if (mi & mj) return 0;
    // Count transpositions needed to interleave J into I: for each j in J,
    // the number of elements of I greater than j.
    int sign = 0;
    for (int j = 0; j < 32; ++j) {
        if (mj & (IndexMask{1} << j)) sign += std::popcount(mi >> (j + 1));
    }
    return (sign & 1) ? -1 : 1;
}

/// Sign s with *(dx^I) = s * dx^{I^c}: the sign of the permutation (I, I^c).
inline int star_sign(int n, IndexMask mi) {
    const IndexMask full = (IndexMask{1} << n) - 1;
    return wedge_sign(mi, full & ~mi);
}

/// Sign of inserting axis j into I (dx^j ^ dx^I = sign * dx^{I|j}).
inline int insert_sign(IndexMask mi, int axis) {
    if (mi & (IndexMask{1} << axis)) return 0;
    const int below = std::popcount(mi & ((IndexMask{1} << axis) - 1));
    return (below & 1) ? -1 : 1;
}

/// Position of mask m in degree_masks(n, deg(m)).
inline int mask_position(int n, IndexMask m) {
    const auto masks = degree_masks(n, mask_degree(m));
    for (size_t q = 0; q < masks.size(); ++q)
        if (masks[q] == m) return static_cast<int>(q);
    throw std::logic_error("mask_position: mask not found");
}

} // namespace torusns

#endif
