#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "hvs/bitstream.hpp"
#include "hvs/core.hpp"
#include "hvs/entropy.hpp"
#include "hvs/intra.hpp"
#include "hvs/perturb.hpp"
#include "hvs/transform.hpp"

namespace hvs {

/// Per-decode stage durations. Stages are accumulated exclusively (no double
/// counting); wall covers the whole decode and is not the stage sum.
/// rd_ns is zero exactly when the strategy skips residual construction.
struct StageTimings {
    std::int64_t ed_ns = 0;    // entropy decoding
    std::int64_t ip_ns = 0;    // intra prediction (reference handling + prediction)
    std::int64_t rd_ns = 0;    // residual construction (dequant + inverse transform + add)
    std::int64_t lf_ns = 0;    // loop filter
    std::int64_t wall_ns = 0;

    double ed_ms() const { return static_cast<double>(ed_ns) / 1e6; }
    double ip_ms() const { return static_cast<double>(ip_ns) / 1e6; }
    double rd_ms() const { return static_cast<double>(rd_ns) / 1e6; }
    double lf_ms() const { return static_cast<double>(lf_ns) / 1e6; }
    double wall_ms() const { return static_cast<double>(wall_ns) / 1e6; }
};

struct FrameHeader {
    std::uint32_t width = 0;   // pre-padding dimensions
    std::uint32_t height = 0;
    int qp = 32;
    int ctu_log2 = kCtuLog2;
    bool loop_filter = true;
};

/// Header plus entropy payload; serializes to the HVS1 container:
/// magic "HVS1", u16le width, u16le height, u8 qp, u8 ctu_log2,
/// u8 flags (bit0 = loop filter), u8 reserved, then payload bytes.
struct EncodedImage {
    FrameHeader header;
    std::vector<std::uint8_t> payload;

    static constexpr std::size_t kHeaderBytes = 12;

    std::vector<std::uint8_t> serialize() const {
        std::vector<std::uint8_t> out;
        out.reserve(kHeaderBytes + payload.size());
        out.insert(out.end(), {'H', 'V', 'S', '1'});
        out.push_back(static_cast<std::uint8_t>(header.width & 0xff));
        out.push_back(static_cast<std::uint8_t>(header.width >> 8));
        out.push_back(static_cast<std::uint8_t>(header.height & 0xff));
        out.push_back(static_cast<std::uint8_t>(header.height >> 8));
        out.push_back(static_cast<std::uint8_t>(header.qp));
        out.push_back(static_cast<std::uint8_t>(header.ctu_log2));
        out.push_back(header.loop_filter ? 1 : 0);
        out.push_back(0);
        out.insert(out.end(), payload.begin(), payload.end());
        return out;
    }

    static EncodedImage deserialize(const std::uint8_t* data, std::size_t size) {
        if (size < kHeaderBytes) throw BitstreamError("container too short");
        if (std::memcmp(data, "HVS1", 4) != 0) throw BitstreamError("bad container magic");
        EncodedImage img;
        img.header.width = static_cast<std::uint32_t>(data[4]) | (static_cast<std::uint32_t>(data[5]) << 8);
        img.header.height = static_cast<std::uint32_t>(data[6]) | (static_cast<std::uint32_t>(data[7]) << 8);
        img.header.qp = data[8];
        img.header.ctu_log2 = data[9];
        img.header.loop_filter = (data[10] & 1) != 0;
        if (img.header.width == 0 || img.header.height == 0)
            throw BitstreamError("container dimensions must be nonzero");
        if (img.header.qp > 51) throw BitstreamError("container qp out of range");
        if (img.header.ctu_log2 != kCtuLog2) throw BitstreamError("unsupported ctu size");
        img.payload.assign(data + kHeaderBytes, data + size);
        return img;
    }

    static EncodedImage deserialize(const std::vector<std::uint8_t>& bytes) {
        return deserialize(bytes.data(), bytes.size());
    }
};

// ---------------------------------------------------------------------------
// Deblocking
// ---------------------------------------------------------------------------

namespace detail {

// HEVC luma deblocking thresholds; tc is indexed at qp + 2 (intra offset,
// boundary strength 2).
inline constexpr std::array<std::uint8_t, 54> kTcTable = {
    0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,
    1,  1,  1,  1,  1,  1,  1,  1,  1,  2,  2,  2,  2,  3,  3,  3,  3,  4,
    4,  4,  5,  5,  6,  6,  7,  8,  9,  10, 11, 13, 14, 16, 18, 20, 22, 24};

inline constexpr std::array<std::uint8_t, 52> kBetaTable = {
    0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  0,  6,  7,
    8,  9,  10, 11, 12, 13, 14, 15, 16, 17, 18, 20, 22, 24, 26, 28, 30, 32,
    34, 36, 38, 40, 42, 44, 46, 48, 50, 52, 54, 56, 58, 60, 62, 64};

inline void deblock_line(Sample& p2, Sample& p1, Sample& p0, Sample& q0, Sample& q1, Sample& q2,
                         int beta, int tc) {
    const int d = std::abs(p2 - 2 * p1 + p0) + std::abs(q2 - 2 * q1 + q0);
    if (d >= beta) return;
    const int raw = (9 * (q0 - p0) - 3 * (q1 - p1) + 8) >> 4;
    if (std::abs(raw) >= 10 * tc) return;  // natural edge, leave untouched
    const int delta = clip3(-tc, tc, raw);
    p0 = clip_sample(p0 + delta);
    q0 = clip_sample(q0 - delta);
}

}  // namespace detail

/// HEVC-style luma normal filter at boundary strength 2 across the given CU
/// edges (left/top edge of each rect, frame-interior only). Vertical edges
/// are filtered first, then horizontal, in place on the running result.
inline Frame deblock(Frame frame, const std::vector<Rect>& cu_rects, int qp) {
    if (qp < 0 || qp > 51) throw Error("deblock: qp out of range [0,51]");
    const int beta = detail::kBetaTable[static_cast<std::size_t>(qp)];
    const int tc = detail::kTcTable[static_cast<std::size_t>(std::min(qp + 2, 53))];
    if (tc == 0) return frame;

    const int w = static_cast<int>(frame.width);
    const int h = static_cast<int>(frame.height);
    for (const auto& r : cu_rects) {
        if (r.x <= 0 || r.x >= w) continue;
        for (int y = r.y; y < std::min(r.y + r.size, h); ++y) {
            Sample* row = frame.row(static_cast<std::uint32_t>(y));
            detail::deblock_line(row[r.x - 3], row[r.x - 2], row[r.x - 1], row[r.x], row[r.x + 1],
                                 row[r.x + 2], beta, tc);
        }
    }
    for (const auto& r : cu_rects) {
        if (r.y <= 0 || r.y >= h) continue;
        for (int x = r.x; x < std::min(r.x + r.size, w); ++x) {
            auto at = [&](int yy) -> Sample& { return frame.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(yy)); };
            detail::deblock_line(at(r.y - 3), at(r.y - 2), at(r.y - 1), at(r.y), at(r.y + 1),
                                 at(r.y + 2), beta, tc);
        }
    }
    return frame;
}

// ---------------------------------------------------------------------------
// CU reconstruction
// ---------------------------------------------------------------------------

namespace detail {

template <class... Ts>
struct Overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

}  // namespace detail

/// Reconstructs one CU from its prediction. Standard adds the decoded
/// residual (dequantize + inverse transform); the substitution strategies
/// never touch coefficient data. RandomPerturbation indexes the series in
/// raster order, reset to 0 at the start of every CU.
inline std::vector<Sample> reconstruct_cu(const PredBlock& pred,
                                          const std::vector<CoeffBlock>* coeffs,
                                          const ReconstructionStrategy& strategy,
                                          const RpSeries* rp, int qp) {
    const int n = pred.n;
    std::vector<Sample> out(static_cast<std::size_t>(n) * n);

    std::visit(detail::Overload{
                   [&](const Standard&) {
                       if (coeffs == nullptr || coeffs->empty())
                           throw Error("standard reconstruction requires coefficient blocks");
                       const int nblocks = coeff_blocks_per_leaf(n);
                       const int bsize = coeff_block_size(n);
                       if (static_cast<int>(coeffs->size()) != nblocks)
                           throw Error("coefficient block count mismatch");
                       const int bx[4] = {0, bsize, 0, bsize};
                       const int by[4] = {0, 0, bsize, bsize};
                       for (int b = 0; b < nblocks; ++b) {
                           const auto& cb = (*coeffs)[static_cast<std::size_t>(b)];
                           if (cb.n != bsize) throw Error("coefficient block size mismatch");
                           const auto res = inverse_transform(dequantize(cb, qp), bsize);
                           for (int y = 0; y < bsize; ++y)
                               for (int x = 0; x < bsize; ++x) {
                                   const int px = bx[b] + x;
                                   const int py = by[b] + y;
                                   out[static_cast<std::size_t>(py) * n + px] = clip_sample(
                                       pred.at(px, py) + res[static_cast<std::size_t>(y) * bsize + x]);
                               }
                       }
                   },
                   [&](const ZeroResidual&) { out = pred.v; },
                   [&](const ConstantResidual& cr) {
                       for (std::size_t i = 0; i < out.size(); ++i)
                           out[i] = clip_sample(pred.v[i] + cr.c);
                   },
                   [&](const RandomPerturbation&) {
                       if (rp == nullptr) throw Error("perturbation reconstruction requires a series");
                       for (std::size_t i = 0; i < out.size(); ++i)
                           out[i] = clip_sample(pred.v[i] + rp->values[i]);
                   },
               },
               strategy);
    return out;
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

struct DecodeResult {
    Frame frame;  // cropped to header dimensions
    StageTimings timings;
    std::uint64_t payload_bits_consumed = 0;
    std::vector<CodingTree> ctu_trees;  // parsed syntax, raster order
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline std::int64_t ns_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

inline void collect_leaf_rects(const CodingTree& t, std::vector<Rect>& out) {
    for_each_leaf(t, [&](const CodingTree& leaf) { out.push_back(leaf.rect); });
}

inline Frame crop(const Frame& padded, std::uint32_t w, std::uint32_t h) {
    if (padded.width == w && padded.height == h) return padded;
    Frame out(w, h);
    for (std::uint32_t y = 0; y < h; ++y)
        std::memcpy(out.row(y), padded.row(y), w);
    return out;
}

}  // namespace detail

inline std::uint32_t padded_extent(std::uint32_t v) {
    return (v + kCtuSize - 1) / kCtuSize * kCtuSize;
}

/// Decodes a frame under the chosen reconstruction strategy. Residual syntax
/// is always parsed; only its construction is strategy-dependent, so the
/// payload bit count consumed is identical for every strategy.
inline DecodeResult decode_frame(const EncodedImage& enc, const ReconstructionStrategy& strategy) {
    validate_strategy(strategy);
    const auto t_begin = detail::Clock::now();

    RpSeries series;
    const RpSeries* rp = nullptr;
    if (const auto* p = std::get_if<RandomPerturbation>(&strategy)) {
        series = generate_rp_series(p->sigma, p->seed);
        rp = &series;
    }
    const bool standard = std::holds_alternative<Standard>(strategy);

    const std::uint32_t pw = padded_extent(enc.header.width);
    const std::uint32_t ph = padded_extent(enc.header.height);
    Frame recon(pw, ph, 0);

    DecodeResult result;
    BitReader r(enc.payload);
    for (std::uint32_t cy = 0; cy < ph; cy += kCtuSize) {
        for (std::uint32_t cx = 0; cx < pw; cx += kCtuSize) {
            const auto t0 = detail::Clock::now();
            CodingTree tree =
                decode_tree(r, Rect{static_cast<int>(cx), static_cast<int>(cy), kCtuSize});
            result.timings.ed_ns += detail::ns_between(t0, detail::Clock::now());

            for_each_leaf(tree, [&](const CodingTree& leaf) {
                const auto t1 = detail::Clock::now();
                RefSamples refs = gather_reference_samples(recon, leaf.rect);
                if (reference_smoothing_applies(leaf.rect.size, leaf.mode))
                    refs = smooth_reference_samples(refs, leaf.mode);
                const PredBlock pred = predict(refs, leaf.mode);
                const auto t2 = detail::Clock::now();
                result.timings.ip_ns += detail::ns_between(t1, t2);

                std::vector<Sample> cu;
                if (standard) {
                    cu = reconstruct_cu(pred, &leaf.coeffs, strategy, nullptr, enc.header.qp);
                    for (int y = 0; y < leaf.rect.size; ++y)
                        std::memcpy(recon.row(static_cast<std::uint32_t>(leaf.rect.y + y)) + leaf.rect.x,
                                    cu.data() + static_cast<std::size_t>(y) * leaf.rect.size,
                                    static_cast<std::size_t>(leaf.rect.size));
                    result.timings.rd_ns += detail::ns_between(t2, detail::Clock::now());
                } else {
                    cu = reconstruct_cu(pred, nullptr, strategy, rp, enc.header.qp);
                    for (int y = 0; y < leaf.rect.size; ++y)
                        std::memcpy(recon.row(static_cast<std::uint32_t>(leaf.rect.y + y)) + leaf.rect.x,
                                    cu.data() + static_cast<std::size_t>(y) * leaf.rect.size,
                                    static_cast<std::size_t>(leaf.rect.size));
                }
            });
            result.ctu_trees.push_back(std::move(tree));
        }
    }
    result.payload_bits_consumed = r.bit_position();
    if (r.bits_remaining() >= 8) throw BitstreamError("trailing data after payload");
    if (r.bits_remaining() > 0 && r.read_bits(static_cast<int>(r.bits_remaining())) != 0)
        throw BitstreamError("nonzero padding bits");

    if (enc.header.loop_filter) {
        const auto t3 = detail::Clock::now();
        std::vector<Rect> rects;
        for (const auto& t : result.ctu_trees) detail::collect_leaf_rects(t, rects);
        recon = deblock(std::move(recon), rects, enc.header.qp);
        result.timings.lf_ns += detail::ns_between(t3, detail::Clock::now());
    }

    result.frame = detail::crop(recon, enc.header.width, enc.header.height);
    result.timings.wall_ns = detail::ns_between(t_begin, detail::Clock::now());
    return result;
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

struct EncodeStats {
    std::uint64_t payload_bits = 0;
    int ctu_count = 0;
    int cu_count = 0;
};

struct EncodeResult {
    EncodedImage image;
    Frame recon;  // encoder-side reconstruction, matches decode_frame(Standard)
    EncodeStats stats;
};

/// Pads to the next CTU multiple by edge replication.
inline Frame pad_to_ctu_multiple(const Frame& f) {
    const std::uint32_t pw = padded_extent(f.width);
    const std::uint32_t ph = padded_extent(f.height);
    if (pw == f.width && ph == f.height) return f;
    Frame out(pw, ph);
    for (std::uint32_t y = 0; y < ph; ++y) {
        const std::uint32_t sy = std::min(y, f.height - 1);
        std::memcpy(out.row(y), f.row(sy), f.width);
        const Sample edge = f.at(f.width - 1, sy);
        for (std::uint32_t x = f.width; x < pw; ++x) out.row(y)[x] = edge;
    }
    return out;
}

namespace detail {

// 8x8 Hadamard SATD, HM normalization.
inline std::int64_t satd8x8(const Sample* a, std::size_t a_stride, const Sample* b,
                            std::size_t b_stride) {
    int m[64];
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            m[y * 8 + x] = static_cast<int>(a[y * a_stride + x]) - static_cast<int>(b[y * b_stride + x]);

    auto butterfly8 = [](int* v, int stride) {
        int t[8];
        for (int i = 0; i < 8; ++i) t[i] = v[i * stride];
        int s0 = t[0] + t[4], d0 = t[0] - t[4];
        int s1 = t[1] + t[5], d1 = t[1] - t[5];
        int s2 = t[2] + t[6], d2 = t[2] - t[6];
        int s3 = t[3] + t[7], d3 = t[3] - t[7];
        int a0 = s0 + s2, a2 = s0 - s2;
        int a1 = s1 + s3, a3 = s1 - s3;
        int b0 = d0 + d2, b2 = d0 - d2;
        int b1 = d1 + d3, b3 = d1 - d3;
        v[0 * stride] = a0 + a1;
        v[1 * stride] = a0 - a1;
        v[2 * stride] = a2 + a3;
        v[3 * stride] = a2 - a3;
        v[4 * stride] = b0 + b1;
        v[5 * stride] = b0 - b1;
        v[6 * stride] = b2 + b3;
        v[7 * stride] = b2 - b3;
    };
    for (int y = 0; y < 8; ++y) butterfly8(m + y * 8, 1);
    for (int x = 0; x < 8; ++x) butterfly8(m + x, 8);

    std::int64_t sum = 0;
    for (const int v : m) sum += std::abs(v);
    return (sum + 2) >> 2;
}

class Encoder {
public:
    Encoder(const Frame& src, int qp)
        : src_(src), recon_(src.width, src.height, 0), qp_(qp),
          lambda_(0.85 * std::exp2((qp - 12) / 3.0)) {}

    CodingTree encode_ctu(Rect rect, int& cu_count) {
        double cost = 0;
        std::uint64_t bits = 0;
        CodingTree tree = choose_cu(rect, cost, bits, cu_count);
        return tree;
    }

    const Frame& recon() const { return recon_; }

private:
    struct LeafOutcome {
        CodingTree tree;
        double cost = 0;
        std::uint64_t bits = 0;
    };

    std::vector<Sample> copy_region(Rect r) const {
        std::vector<Sample> out(static_cast<std::size_t>(r.size) * r.size);
        for (int y = 0; y < r.size; ++y)
            std::memcpy(out.data() + static_cast<std::size_t>(y) * r.size,
                        recon_.row(static_cast<std::uint32_t>(r.y + y)) + r.x,
                        static_cast<std::size_t>(r.size));
        return out;
    }

    void restore_region(Rect r, const std::vector<Sample>& data) {
        for (int y = 0; y < r.size; ++y)
            std::memcpy(recon_.row(static_cast<std::uint32_t>(r.y + y)) + r.x,
                        data.data() + static_cast<std::size_t>(y) * r.size,
                        static_cast<std::size_t>(r.size));
    }

    // Builds the best leaf for rect (SATD mode decision, closed-loop
    // reconstruction written into recon_) and returns its RD outcome.
    LeafOutcome build_leaf(Rect rect) {
        const int n = rect.size;
        const RefSamples refs_raw = gather_reference_samples(recon_, rect);
        const RefSamples refs_flt = smooth_reference_samples(refs_raw, IntraMode{IntraMode::kPlanar});

        IntraMode best_mode{IntraMode::kDc};
        std::int64_t best_satd = -1;
        for (std::uint8_t m = 0; m < kNumIntraModes; ++m) {
            const IntraMode mode{m};
            const RefSamples& refs = reference_smoothing_applies(n, mode) ? refs_flt : refs_raw;
            const PredBlock pred = predict(refs, mode);
            std::int64_t satd = 0;
            for (int y = 0; y < n; y += 8)
                for (int x = 0; x < n; x += 8)
                    satd += satd8x8(src_.row(static_cast<std::uint32_t>(rect.y + y)) + rect.x + x,
                                    src_.width, pred.v.data() + static_cast<std::size_t>(y) * n + x,
                                    static_cast<std::size_t>(n));
            if (best_satd < 0 || satd < best_satd) {
                best_satd = satd;
                best_mode = mode;
            }
        }

        const RefSamples& refs = reference_smoothing_applies(n, best_mode) ? refs_flt : refs_raw;
        const PredBlock pred = predict(refs, best_mode);

        CodingTree leaf;
        leaf.rect = rect;
        leaf.mode = best_mode;
        const int bsize = coeff_block_size(n);
        const int nblocks = coeff_blocks_per_leaf(n);
        const int bx[4] = {0, bsize, 0, bsize};
        const int by[4] = {0, 0, bsize, bsize};
        for (int b = 0; b < nblocks; ++b) {
            std::vector<std::int32_t> residual(static_cast<std::size_t>(bsize) * bsize);
            for (int y = 0; y < bsize; ++y)
                for (int x = 0; x < bsize; ++x) {
                    const int px = rect.x + bx[b] + x;
                    const int py = rect.y + by[b] + y;
                    residual[static_cast<std::size_t>(y) * bsize + x] =
                        static_cast<int>(src_.at(static_cast<std::uint32_t>(px),
                                                 static_cast<std::uint32_t>(py))) -
                        static_cast<int>(pred.at(bx[b] + x, by[b] + y));
                }
            leaf.coeffs.push_back(quantize(forward_transform(residual, bsize), qp_, bsize));
        }

        const auto cu = reconstruct_cu(pred, &leaf.coeffs, Standard{}, nullptr, qp_);
        for (int y = 0; y < n; ++y)
            std::memcpy(recon_.row(static_cast<std::uint32_t>(rect.y + y)) + rect.x,
                        cu.data() + static_cast<std::size_t>(y) * n, static_cast<std::size_t>(n));

        std::int64_t sse = 0;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                const int d = static_cast<int>(src_.at(static_cast<std::uint32_t>(rect.x + x),
                                                       static_cast<std::uint32_t>(rect.y + y))) -
                              static_cast<int>(cu[static_cast<std::size_t>(y) * n + x]);
                sse += static_cast<std::int64_t>(d) * d;
            }

        BitWriter counter;
        counter.write_bits(best_mode.index, 6);
        for (const auto& blk : leaf.coeffs) encode_coeffs(counter, blk);
        const std::uint64_t bits = counter.bit_count() + (n > kMinCuSize ? 1 : 0);

        LeafOutcome out;
        out.tree = std::move(leaf);
        out.cost = static_cast<double>(sse) + lambda_ * static_cast<double>(bits);
        out.bits = bits;
        return out;
    }

    // RD split decision: cost = SSE + lambda * bits, children evaluated
    // closed-loop in z-order. Leaves recon_ holding the winner's samples.
    CodingTree choose_cu(Rect rect, double& cost, std::uint64_t& bits, int& cu_count) {
        if (rect.size == kMinCuSize) {
            LeafOutcome leaf = build_leaf(rect);
            cost = leaf.cost;
            bits = leaf.bits;
            ++cu_count;
            return std::move(leaf.tree);
        }

        const auto before = copy_region(rect);
        LeafOutcome leaf = build_leaf(rect);
        const auto leaf_recon = copy_region(rect);
        restore_region(rect, before);

        const int half = rect.size / 2;
        const int ox[4] = {0, half, 0, half};
        const int oy[4] = {0, 0, half, half};
        CodingTree split;
        split.rect = rect;
        split.children.reserve(4);
        double split_cost = 0;
        std::uint64_t split_bits = 1;  // the split flag itself
        int split_cus = 0;
        for (int i = 0; i < 4; ++i) {
            double child_cost = 0;
            std::uint64_t child_bits = 0;
            split.children.push_back(choose_cu(Rect{rect.x + ox[i], rect.y + oy[i], half},
                                               child_cost, child_bits, split_cus));
            split_cost += child_cost;
            split_bits += child_bits;
        }
        split_cost += lambda_;  // cost of the split flag bit

        if (leaf.cost <= split_cost) {
            restore_region(rect, leaf_recon);
            cost = leaf.cost;
            bits = leaf.bits;
            ++cu_count;
            return std::move(leaf.tree);
        }
        cost = split_cost;
        bits = split_bits;
        cu_count += split_cus;
        return split;
    }

    const Frame& src_;
    Frame recon_;
    int qp_;
    double lambda_;
};

}  // namespace detail

/// Intra-encodes a frame: per CTU a recursive RD split decision
/// (cost = SSE + lambda * bits, lambda = 0.85 * 2^((qp-12)/3)), per CU the
/// SATD-best of the 35 modes, closed-loop reconstruction throughout.
inline EncodeResult encode_frame(const Frame& frame, const CodecConfig& cfg) {
    cfg.validate();
    if (frame.width > 65535 || frame.height > 65535)
        throw Error("encode_frame: dimensions exceed container limit");

    const Frame padded = pad_to_ctu_multiple(frame);
    detail::Encoder enc(padded, cfg.qp);

    BitWriter w;
    std::vector<CodingTree> trees;
    EncodeStats stats;
    for (std::uint32_t cy = 0; cy < padded.height; cy += kCtuSize) {
        for (std::uint32_t cx = 0; cx < padded.width; cx += kCtuSize) {
            CodingTree tree = enc.encode_ctu(
                Rect{static_cast<int>(cx), static_cast<int>(cy), kCtuSize}, stats.cu_count);
            encode_tree(w, tree);
            trees.push_back(std::move(tree));
            ++stats.ctu_count;
        }
    }
    stats.payload_bits = w.bit_count();

    EncodeResult result;
    result.image.header =
        FrameHeader{frame.width, frame.height, cfg.qp, kCtuLog2, cfg.loop_filter_enabled};
    result.image.payload = w.finish();

    Frame recon = enc.recon();
    if (cfg.loop_filter_enabled) {
        std::vector<Rect> rects;
        for (const auto& t : trees) detail::collect_leaf_rects(t, rects);
        recon = deblock(std::move(recon), rects, cfg.qp);
    }
    result.recon = detail::crop(recon, frame.width, frame.height);
    result.stats = stats;
    return result;
}

}  // namespace hvs
