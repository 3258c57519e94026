#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "hvs/core.hpp"

namespace hvs {
namespace detail {

// Fixed-point DCT-II basis. Entry (k,n) of the N-point matrix is
// sign(a) * kDctValues[a] after folding the angle index a = k*(2n+1)*(32/N)
// into [0,32]; kDctValues[a] = round(4096 * 64*sqrt(2) * cos(a*pi/64)) with
// kDctValues[0] = 64*4096 (DC row). Six bits more precision than the HEVC
// tables so the inverse reproduces arbitrary residuals within +/-1; the
// extra bits are absorbed by the shift schedule, keeping HEVC output scaling.
inline constexpr int kBasisPrecision = 6;

inline constexpr std::array<int, 33> kDctValues = {
    4096, 5786, 5765, 5730, 5681, 5619, 5543, 5454, 5352, 5236, 5109,
    4968, 4816, 4653, 4478, 4292, 4096, 3890, 3675, 3451, 3218, 2978,
    2731, 2477, 2217, 1951, 1682, 1407, 1130, 850,  568,  284,  0};

constexpr int dct_entry(int size, int k, int n) {
    int m = (k * (2 * n + 1) * (32 / size)) % 128;
    int sign = 1;
    if (m > 64) m = 128 - m;
    if (m > 32) {
        m = 64 - m;
        sign = -1;
    }
    return sign * kDctValues[static_cast<std::size_t>(m)];
}

template <int N>
constexpr std::array<std::array<int, N>, N> make_dct_matrix() {
    std::array<std::array<int, N>, N> t{};
    for (int k = 0; k < N; ++k)
        for (int n = 0; n < N; ++n) t[k][n] = dct_entry(N, k, n);
    return t;
}

inline constexpr auto kDct4 = make_dct_matrix<4>();
inline constexpr auto kDct8 = make_dct_matrix<8>();
inline constexpr auto kDct16 = make_dct_matrix<16>();
inline constexpr auto kDct32 = make_dct_matrix<32>();

// DST-VII for 4x4 blocks, same 4096x precision:
// round(4096 * (256/3) * sin((2k+1)(n+1) pi / 9)).
inline constexpr std::array<std::array<int, 4>, 4> kDst4 = {{
    {1868, 3510, 4730, 5378},
    {4730, 4730, 0, -4730},
    {5378, -1868, -4730, 3510},
    {3510, -5378, 4730, -1868},
}};

inline const int* basis_row(int n, int k, bool dst) {
    if (dst) return kDst4[static_cast<std::size_t>(k)].data();
    switch (n) {
        case 4: return kDct4[static_cast<std::size_t>(k)].data();
        case 8: return kDct8[static_cast<std::size_t>(k)].data();
        case 16: return kDct16[static_cast<std::size_t>(k)].data();
        case 32: return kDct32[static_cast<std::size_t>(k)].data();
        default: throw Error("unsupported transform size");
    }
}

inline int log2_size(int n) {
    switch (n) {
        case 4: return 2;
        case 8: return 3;
        case 16: return 4;
        case 32: return 5;
        default: throw Error("unsupported transform size");
    }
}

}  // namespace detail

/// Forward transform of an N x N residual block (values in [-255,255]).
/// Integer DCT-II, separable row/column passes with HEVC 8-bit output
/// scaling; 4x4 blocks use DST-VII. The intermediate pass is carried at full
/// precision and rounded once at the end, so the transform is linear within
/// +/-1 per coefficient by construction.
inline std::vector<std::int32_t> forward_transform(const std::vector<std::int32_t>& residual,
                                                   int n) {
    const int log2n = detail::log2_size(n);
    if (residual.size() != static_cast<std::size_t>(n) * n)
        throw Error("forward_transform: block size mismatch");
    const bool dst = n == 4;
    const int shift = 2 * log2n + 5 + 2 * detail::kBasisPrecision;
    const std::int64_t rnd = std::int64_t{1} << (shift - 1);

    // Horizontal pass, unrounded: tmp[y][k] = row y of src against basis row k.
    std::vector<std::int64_t> tmp(static_cast<std::size_t>(n) * n);
    for (int y = 0; y < n; ++y) {
        const std::int32_t* src = residual.data() + static_cast<std::size_t>(y) * n;
        for (int k = 0; k < n; ++k) {
            const int* b = detail::basis_row(n, k, dst);
            std::int64_t acc = 0;
            for (int x = 0; x < n; ++x) acc += static_cast<std::int64_t>(b[x]) * src[x];
            tmp[static_cast<std::size_t>(y) * n + k] = acc;
        }
    }
    // Vertical pass: out[ky][kx] = column kx of tmp against basis row ky.
    std::vector<std::int32_t> out(static_cast<std::size_t>(n) * n);
    for (int kx = 0; kx < n; ++kx) {
        for (int ky = 0; ky < n; ++ky) {
            const int* b = detail::basis_row(n, ky, dst);
            std::int64_t acc = 0;
            for (int y = 0; y < n; ++y)
                acc += static_cast<std::int64_t>(b[y]) * tmp[static_cast<std::size_t>(y) * n + kx];
            out[static_cast<std::size_t>(ky) * n + kx] = static_cast<std::int32_t>((acc + rnd) >> shift);
        }
    }
    return out;
}

/// Inverse of forward_transform within rounding; output clipped to
/// [-255,255] ahead of the reconstruction add.
inline std::vector<std::int32_t> inverse_transform(const std::vector<std::int32_t>& coeffs,
                                                   int n) {
    (void)detail::log2_size(n);  // validates n
    if (coeffs.size() != static_cast<std::size_t>(n) * n)
        throw Error("inverse_transform: block size mismatch");
    const bool dst = n == 4;
    const int shift = 19 + 2 * detail::kBasisPrecision;
    const std::int64_t rnd = std::int64_t{1} << (shift - 1);

    // Vertical pass, unrounded: tmp[y][kx] = sum_ky T[ky][y] * coeff[ky][kx].
    std::vector<std::int64_t> tmp(static_cast<std::size_t>(n) * n);
    for (int kx = 0; kx < n; ++kx) {
        for (int y = 0; y < n; ++y) {
            std::int64_t acc = 0;
            for (int ky = 0; ky < n; ++ky)
                acc += static_cast<std::int64_t>(detail::basis_row(n, ky, dst)[y]) *
                       coeffs[static_cast<std::size_t>(ky) * n + kx];
            tmp[static_cast<std::size_t>(y) * n + kx] = acc;
        }
    }
    // Horizontal pass.
    std::vector<std::int32_t> out(static_cast<std::size_t>(n) * n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            std::int64_t acc = 0;
            for (int kx = 0; kx < n; ++kx)
                acc += static_cast<std::int64_t>(detail::basis_row(n, kx, dst)[x]) *
                       tmp[static_cast<std::size_t>(y) * n + kx];
            out[static_cast<std::size_t>(y) * n + x] =
                clip3(-255, 255, static_cast<std::int32_t>((acc + rnd) >> shift));
        }
    }
    return out;
}

namespace detail {
inline constexpr std::array<int, 6> kQuantScale = {26214, 23302, 20560, 18396, 16384, 14564};
inline constexpr std::array<int, 6> kInvQuantScale = {40, 45, 51, 57, 64, 72};
}  // namespace detail

/// Dead-zone scalar quantizer (intra rounding offset = 1/3 step).
inline CoeffBlock quantize(const std::vector<std::int32_t>& coeffs, int qp, int n) {
    if (qp < 0 || qp > 51) throw Error("quantize: qp out of range [0,51]");
    const int log2n = detail::log2_size(n);
    if (coeffs.size() != static_cast<std::size_t>(n) * n)
        throw Error("quantize: block size mismatch");
    const int qbits = 21 + qp / 6 - log2n;
    const std::int64_t scale = detail::kQuantScale[static_cast<std::size_t>(qp % 6)];
    const std::int64_t offset = static_cast<std::int64_t>(171) << (qbits - 9);

    CoeffBlock out(n);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const std::int64_t c = coeffs[i];
        const std::int64_t mag = (std::abs(c) * scale + offset) >> qbits;
        const std::int64_t level = c < 0 ? -mag : mag;
        out.levels[i] = static_cast<std::int16_t>(clip3(-32767, 32767, static_cast<int>(level)));
    }
    return out;
}

inline std::vector<std::int32_t> dequantize(const CoeffBlock& block, int qp) {
    if (qp < 0 || qp > 51) throw Error("dequantize: qp out of range [0,51]");
    const int log2n = detail::log2_size(block.n);
    const int ishift = log2n - 1;
    const std::int64_t scale = static_cast<std::int64_t>(
                                   detail::kInvQuantScale[static_cast<std::size_t>(qp % 6)])
                               << (qp / 6);
    std::vector<std::int32_t> out(block.levels.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::int64_t d = (block.levels[i] * scale + (1 << (ishift - 1))) >> ishift;
        out[i] = clip3(-32768, 32767, static_cast<std::int32_t>(d));
    }
    return out;
}

}  // namespace hvs
