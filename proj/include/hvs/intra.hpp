#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "hvs/core.hpp"

namespace hvs {

/// Boundary reference samples for an N x N CU, availability already
/// resolved. top[0] is the corner p(-1,-1), top[1+i] = p(i,-1) for
/// i in [0,2N); left[j] = p(-1,j) for j in [0,2N).
struct RefSamples {
    int n = 0;
    std::vector<Sample> top;   // 2n+1
    std::vector<Sample> left;  // 2n
};

/// N x N predicted samples, row-major.
struct PredBlock {
    int n = 0;
    std::vector<Sample> v;

    explicit PredBlock(int size = 0) : n(size), v(static_cast<std::size_t>(size) * size, 0) {}
    Sample at(int x, int y) const { return v[static_cast<std::size_t>(y) * n + x]; }
    Sample& at(int x, int y) { return v[static_cast<std::size_t>(y) * n + x]; }
};

namespace detail {

// Morton index of an 8x8 block within its CTU; DFS over the quadtree visits
// blocks exactly in this order.
inline std::uint32_t morton8(std::uint32_t bx, std::uint32_t by) {
    std::uint32_t m = 0;
    for (int i = 0; i < kCtuLog2 - kMinCuLog2; ++i)
        m |= ((bx >> i) & 1u) << (2 * i) | ((by >> i) & 1u) << (2 * i + 1);
    return m;
}

}  // namespace detail

/// True when the sample at (sx,sy) is reconstructed before the CU whose
/// origin is (cux,cuy). Decode order is CTU raster order, then z-order of
/// 8x8 blocks inside a CTU.
inline bool precedes_in_decode_order(int sx, int sy, int cux, int cuy, std::uint32_t frame_width) {
    const int ctus_per_row = static_cast<int>((frame_width + kCtuSize - 1) / kCtuSize);
    const int s_ctu = (sy >> kCtuLog2) * ctus_per_row + (sx >> kCtuLog2);
    const int c_ctu = (cuy >> kCtuLog2) * ctus_per_row + (cux >> kCtuLog2);
    if (s_ctu != c_ctu) return s_ctu < c_ctu;
    const std::uint32_t mask = (kCtuSize >> kMinCuLog2) - 1;
    const std::uint32_t sm = detail::morton8((sx >> kMinCuLog2) & mask, (sy >> kMinCuLog2) & mask);
    const std::uint32_t cm = detail::morton8((cux >> kMinCuLog2) & mask, (cuy >> kMinCuLog2) & mask);
    return sm < cm;
}

/// Gathers the 4N+1 boundary references of `rect` from the reconstructed
/// frame. Unavailable segments are filled by propagating the nearest
/// available sample along the bottom-left -> corner -> top-right scan; if
/// nothing is available every entry is 128.
inline RefSamples gather_reference_samples(const Frame& recon, Rect rect) {
    const int n = rect.size;
    if (rect.x < 0 || rect.y < 0 || rect.x + n > static_cast<int>(recon.width) ||
        rect.y + n > static_cast<int>(recon.height))
        throw Error("gather_reference_samples: rect outside frame");

    const int total = 4 * n + 1;
    std::vector<int> scan(total, -1);  // -1 = unavailable

    auto fetch = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= static_cast<int>(recon.width) ||
            y >= static_cast<int>(recon.height))
            return -1;
        if (!precedes_in_decode_order(x, y, rect.x, rect.y, recon.width)) return -1;
        return recon.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
    };

    // Scan order: left column bottom -> top, corner, top row left -> right.
    for (int i = 0; i < 2 * n; ++i) scan[i] = fetch(rect.x - 1, rect.y + 2 * n - 1 - i);
    scan[2 * n] = fetch(rect.x - 1, rect.y - 1);
    for (int i = 0; i < 2 * n; ++i) scan[2 * n + 1 + i] = fetch(rect.x + i, rect.y - 1);

    const bool any = std::any_of(scan.begin(), scan.end(), [](int v) { return v >= 0; });
    if (!any) {
        std::fill(scan.begin(), scan.end(), 128);
    } else {
        if (scan[0] < 0) scan[0] = *std::find_if(scan.begin(), scan.end(), [](int v) { return v >= 0; });
        for (int i = 1; i < total; ++i)
            if (scan[i] < 0) scan[i] = scan[i - 1];
    }

    RefSamples refs;
    refs.n = n;
    refs.left.resize(2 * n);
    refs.top.resize(2 * n + 1);
    for (int j = 0; j < 2 * n; ++j) refs.left[j] = static_cast<Sample>(scan[2 * n - 1 - j]);
    refs.top[0] = static_cast<Sample>(scan[2 * n]);
    for (int i = 0; i < 2 * n; ++i) refs.top[1 + i] = static_cast<Sample>(scan[2 * n + 1 + i]);
    return refs;
}

/// Mode-dependent [1 2 1]/4 reference smoothing. Applied for Planar and for
/// angular modes far enough from pure horizontal (10) and vertical (26);
/// never for DC, never below 8x8.
inline bool reference_smoothing_applies(int n, IntraMode mode) {
    if (n < 8 || mode.index == IntraMode::kDc) return false;
    if (mode.index == IntraMode::kPlanar) return true;
    const int dist = std::min(std::abs(mode.index - 10), std::abs(mode.index - 26));
    const int thr = n == 8 ? 7 : (n == 16 ? 1 : 0);
    return dist > thr;
}

inline RefSamples smooth_reference_samples(const RefSamples& refs, IntraMode mode) {
    const int n = refs.n;
    if (!reference_smoothing_applies(n, mode)) return refs;

    const int total = 4 * n + 1;
    std::vector<int> a(total);
    for (int j = 0; j < 2 * n; ++j) a[j] = refs.left[2 * n - 1 - j];
    a[2 * n] = refs.top[0];
    for (int i = 0; i < 2 * n; ++i) a[2 * n + 1 + i] = refs.top[1 + i];

    std::vector<int> f(total);
    f[0] = a[0];
    f[total - 1] = a[total - 1];
    for (int i = 1; i < total - 1; ++i) f[i] = (a[i - 1] + 2 * a[i] + a[i + 1] + 2) >> 2;

    RefSamples out;
    out.n = n;
    out.left.resize(2 * n);
    out.top.resize(2 * n + 1);
    for (int j = 0; j < 2 * n; ++j) out.left[j] = static_cast<Sample>(f[2 * n - 1 - j]);
    out.top[0] = static_cast<Sample>(f[2 * n]);
    for (int i = 0; i < 2 * n; ++i) out.top[1 + i] = static_cast<Sample>(f[2 * n + 1 + i]);
    return out;
}

namespace detail {

// HEVC angular geometry, modes 2..34.
inline constexpr std::array<int, 35> kAngleTable = {
    0,  0,                                            // planar, dc (unused)
    32, 26, 21, 17, 13, 9,  5,  2,  0,  -2, -5, -9,   // 2..13
    -13, -17, -21, -26, -32, -26, -21, -17, -13, -9,  // 14..23
    -5, -2, 0,  2,  5,  9,  13, 17, 21, 26, 32};      // 24..34

inline int inverse_angle(int angle) {
    // 8192 / |angle|, as tabulated in the HEVC spec.
    switch (angle) {
        case -2: return -4096;
        case -5: return -1638;
        case -9: return -910;
        case -13: return -630;
        case -17: return -482;
        case -21: return -390;
        case -26: return -315;
        case -32: return -256;
        default: return 0;
    }
}

inline PredBlock predict_planar(const RefSamples& refs, int n) {
    PredBlock out(n);
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    const int tr = refs.top[1 + n];   // p(N,-1)
    const int bl = refs.left[n];      // p(-1,N)
    for (int y = 0; y < n; ++y) {
        const int l = refs.left[y];
        for (int x = 0; x < n; ++x) {
            const int t = refs.top[1 + x];
            const int v = ((n - 1 - x) * l + (x + 1) * tr + (n - 1 - y) * t + (y + 1) * bl + n) >>
                          (log2n + 1);
            out.at(x, y) = static_cast<Sample>(v);
        }
    }
    return out;
}

inline PredBlock predict_dc(const RefSamples& refs, int n) {
    PredBlock out(n);
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    int sum = n;
    for (int i = 0; i < n; ++i) sum += refs.top[1 + i] + refs.left[i];
    const int dc = sum >> (log2n + 1);
    for (auto& s : out.v) s = static_cast<Sample>(dc);
    if (n < 32) {  // boundary smoothing of first row/column
        out.at(0, 0) = static_cast<Sample>((refs.left[0] + 2 * dc + refs.top[1] + 2) >> 2);
        for (int x = 1; x < n; ++x)
            out.at(x, 0) = static_cast<Sample>((refs.top[1 + x] + 3 * dc + 2) >> 2);
        for (int y = 1; y < n; ++y)
            out.at(0, y) = static_cast<Sample>((refs.left[y] + 3 * dc + 2) >> 2);
    }
    return out;
}

inline PredBlock predict_angular(const RefSamples& refs, int n, int mode) {
    const bool vertical = mode >= 18;
    const int angle = kAngleTable[static_cast<std::size_t>(mode)];
    const int inv_angle = inverse_angle(angle);

    // Main reference: ref[x] = p(x-1,-1) for the vertical group, transposed
    // for the horizontal group. Stored with an offset so negative projections
    // (down to -N) index the side reference.
    std::vector<int> ref(static_cast<std::size_t>(3 * n + 1));
    const int off = n;
    auto main_at = [&](int i) -> int { return vertical ? refs.top[i] : (i == 0 ? refs.top[0] : refs.left[i - 1]); };
    auto side_at = [&](int i) -> int { return vertical ? (i == 0 ? refs.top[0] : refs.left[i - 1]) : refs.top[i]; };

    if (angle < 0) {
        for (int i = 0; i <= n; ++i) ref[static_cast<std::size_t>(off + i)] = main_at(i);
        const int low = (n * angle) >> 5;
        for (int i = -1; i >= low; --i)
            ref[static_cast<std::size_t>(off + i)] = side_at((i * inv_angle + 128) >> 8);
    } else {
        for (int i = 0; i <= 2 * n; ++i) ref[static_cast<std::size_t>(off + i)] = main_at(i);
    }

    PredBlock out(n);
    for (int d = 0; d < n; ++d) {
        const int pos = (d + 1) * angle;
        const int idx = pos >> 5;
        const int frac = pos & 31;
        for (int t = 0; t < n; ++t) {
            int v;
            if (frac == 0) {
                v = ref[static_cast<std::size_t>(off + t + idx + 1)];
            } else {
                v = ((32 - frac) * ref[static_cast<std::size_t>(off + t + idx + 1)] +
                     frac * ref[static_cast<std::size_t>(off + t + idx + 2)] + 16) >>
                    5;
            }
            if (vertical)
                out.at(t, d) = static_cast<Sample>(v);
            else
                out.at(d, t) = static_cast<Sample>(v);
        }
    }
    return out;
}

}  // namespace detail

/// Intra prediction of an N x N block from resolved reference samples.
/// Pure function of (refs, mode).
inline PredBlock predict(const RefSamples& refs, IntraMode mode) {
    if (!mode.valid()) throw Error("predict: invalid intra mode");
    if (mode.index == IntraMode::kPlanar) return detail::predict_planar(refs, refs.n);
    if (mode.index == IntraMode::kDc) return detail::predict_dc(refs, refs.n);
    return detail::predict_angular(refs, refs.n, mode.index);
}

}  // namespace hvs
