#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "hvs/bitstream.hpp"
#include "hvs/core.hpp"

namespace hvs {

/// Up-right diagonal scan positions for an N x N block: diagonals d = x+y in
/// increasing order, each traversed bottom-left to top-right.
inline std::vector<int> diagonal_scan(int n) {
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n) * n);
    for (int d = 0; d <= 2 * n - 2; ++d) {
        for (int y = std::min(d, n - 1); y >= std::max(0, d - n + 1); --y) {
            const int x = d - y;
            order.push_back(y * n + x);
        }
    }
    return order;
}

/// Coefficient block syntax: ue(nnz), then per nonzero in scan order:
/// ue(zero run since previous nonzero), ue(|level|-1), 1 sign bit (1 = negative).
inline void encode_coeffs(BitWriter& w, const CoeffBlock& block) {
    const auto scan = diagonal_scan(block.n);
    std::uint32_t nnz = 0;
    for (const int pos : scan)
        if (block.levels[static_cast<std::size_t>(pos)] != 0) ++nnz;
    w.write_ue(nnz);
    int prev = -1;
    for (int i = 0; i < static_cast<int>(scan.size()); ++i) {
        const int level = block.levels[static_cast<std::size_t>(scan[static_cast<std::size_t>(i)])];
        if (level == 0) continue;
        w.write_ue(static_cast<std::uint32_t>(i - prev - 1));
        w.write_ue(static_cast<std::uint32_t>(std::abs(level)) - 1);
        w.write_bit(level < 0 ? 1 : 0);
        prev = i;
    }
}

inline CoeffBlock decode_coeffs(BitReader& r, int n) {
    const auto scan = diagonal_scan(n);
    CoeffBlock block(n);
    const std::uint32_t nnz = r.read_ue();
    if (nnz > static_cast<std::uint32_t>(n) * static_cast<std::uint32_t>(n))
        throw BitstreamError("coefficient count exceeds block size");
    int pos = -1;
    for (std::uint32_t k = 0; k < nnz; ++k) {
        const std::uint32_t run = r.read_ue();
        pos += static_cast<int>(run) + 1;
        if (pos >= n * n) throw BitstreamError("coefficient scan position out of range");
        const std::uint32_t mag = r.read_ue() + 1;
        if (mag >= (1u << 15)) throw BitstreamError("coefficient magnitude out of range");
        const std::uint32_t sign = r.read_bit();
        block.levels[static_cast<std::size_t>(scan[static_cast<std::size_t>(pos)])] =
            static_cast<std::int16_t>(sign ? -static_cast<std::int32_t>(mag)
                                           : static_cast<std::int32_t>(mag));
    }
    return block;
}

/// Depth-first tree serialization: one split bit per node (omitted at 8x8),
/// per leaf a 6-bit mode then its coefficient blocks.
inline void encode_tree(BitWriter& w, const CodingTree& tree) {
    validate_tree(tree);
    if (tree.rect.size > kMinCuSize) w.write_bit(tree.is_leaf() ? 0 : 1);
    if (tree.is_leaf()) {
        w.write_bits(tree.mode.index, 6);
        for (const auto& b : tree.coeffs) encode_coeffs(w, b);
        return;
    }
    for (const auto& child : tree.children) encode_tree(w, child);
}

/// Inverse of encode_tree. Always parses coefficient data; which strategy
/// later consumes it is irrelevant to the cursor.
inline CodingTree decode_tree(BitReader& r, Rect rect) {
    CodingTree node;
    node.rect = rect;
    const bool split = rect.size > kMinCuSize && r.read_bit() != 0;
    if (split) {
        const int half = rect.size / 2;
        const int ox[4] = {0, half, 0, half};
        const int oy[4] = {0, 0, half, half};
        node.children.reserve(4);
        for (int i = 0; i < 4; ++i)
            node.children.push_back(decode_tree(r, Rect{rect.x + ox[i], rect.y + oy[i], half}));
        return node;
    }
    const std::uint32_t mode = r.read_bits(6);
    if (mode >= kNumIntraModes) throw BitstreamError("intra mode out of range");
    node.mode = IntraMode{static_cast<std::uint8_t>(mode)};
    const int count = coeff_blocks_per_leaf(rect.size);
    const int bsize = coeff_block_size(rect.size);
    node.coeffs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) node.coeffs.push_back(decode_coeffs(r, bsize));
    return node;
}

}  // namespace hvs
