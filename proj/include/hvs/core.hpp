#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hvs {

using Sample = std::uint8_t;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parse-level failure: truncated stream, malformed code, bad container.
struct BitstreamError : Error {
    explicit BitstreamError(const std::string& msg) : Error(msg) {}
};

constexpr int kCtuLog2 = 6;
constexpr int kCtuSize = 1 << kCtuLog2;      // 64
constexpr int kMinCuLog2 = 3;
constexpr int kMinCuSize = 1 << kMinCuLog2;  // 8
constexpr int kMaxTransformSize = 32;
constexpr int kNumIntraModes = 35;

inline int clip3(int lo, int hi, int v) { return v < lo ? lo : (v > hi ? hi : v); }
inline Sample clip_sample(int v) { return static_cast<Sample>(clip3(0, 255, v)); }

/// 8-bit grayscale sample plane, row-major.
struct Frame {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<Sample> samples;

    Frame() = default;

    Frame(std::uint32_t w, std::uint32_t h, Sample fill = 0)
        : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {
        if (w == 0 || h == 0) throw Error("frame dimensions must be nonzero");
    }

    Frame(std::uint32_t w, std::uint32_t h, std::vector<Sample> s)
        : width(w), height(h), samples(std::move(s)) {
        if (w == 0 || h == 0) throw Error("frame dimensions must be nonzero");
        if (samples.size() != static_cast<std::size_t>(w) * h)
            throw Error("sample count does not match frame dimensions");
    }

    Sample at(std::uint32_t x, std::uint32_t y) const {
        return samples[static_cast<std::size_t>(y) * width + x];
    }
    Sample& at(std::uint32_t x, std::uint32_t y) {
        return samples[static_cast<std::size_t>(y) * width + x];
    }
    const Sample* row(std::uint32_t y) const { return samples.data() + static_cast<std::size_t>(y) * width; }
    Sample* row(std::uint32_t y) { return samples.data() + static_cast<std::size_t>(y) * width; }

    bool operator==(const Frame&) const = default;
};

struct CodecConfig {
    int qp = 32;
    int ctu_log2 = kCtuLog2;       // fixed at 6
    int min_cu_log2 = kMinCuLog2;  // fixed at 3
    bool loop_filter_enabled = true;

    void validate() const {
        if (qp < 0 || qp > 51) throw Error("qp out of range [0,51]");
        if (ctu_log2 != kCtuLog2) throw Error("ctu_log2 must be 6");
        if (min_cu_log2 != kMinCuLog2) throw Error("min_cu_log2 must be 3");
    }
};

/// Intra prediction mode: 0 = Planar, 1 = DC, 2..34 = Angular.
struct IntraMode {
    std::uint8_t index = 1;

    static constexpr std::uint8_t kPlanar = 0;
    static constexpr std::uint8_t kDc = 1;

    bool is_angular() const { return index >= 2; }
    bool valid() const { return index < kNumIntraModes; }
    bool operator==(const IntraMode&) const = default;
};

// Decoder-side reconstruction strategies.
struct Standard {};
struct ZeroResidual {};
struct ConstantResidual {
    int c = 0;
};
struct RandomPerturbation {
    double sigma = 7.0;
    std::uint64_t seed = 1;
};

using ReconstructionStrategy =
    std::variant<Standard, ZeroResidual, ConstantResidual, RandomPerturbation>;

inline void validate_strategy(const ReconstructionStrategy& s) {
    if (const auto* cr = std::get_if<ConstantResidual>(&s)) {
        if (cr->c < -255 || cr->c > 255) throw Error("constant residual out of range [-255,255]");
    } else if (const auto* rp = std::get_if<RandomPerturbation>(&s)) {
        if (!(rp->sigma > 0.0)) throw Error("perturbation sigma must be positive");
    }
}

inline std::string strategy_name(const ReconstructionStrategy& s) {
    if (std::holds_alternative<Standard>(s)) return "standard";
    if (std::holds_alternative<ZeroResidual>(s)) return "zero";
    if (const auto* cr = std::get_if<ConstantResidual>(&s))
        return "constant:" + std::to_string(cr->c);
    return "perturb";
}

/// Quantized transform coefficients for one N x N block, N in {4,8,16,32}.
struct CoeffBlock {
    int n = 0;
    std::vector<std::int16_t> levels;  // n*n, row-major

    CoeffBlock() = default;
    explicit CoeffBlock(int size) : n(size), levels(static_cast<std::size_t>(size) * size, 0) {}

    bool operator==(const CoeffBlock&) const = default;
};

struct Rect {
    int x = 0;
    int y = 0;
    int size = 0;

    bool operator==(const Rect&) const = default;
};

/// Recursive CU quadtree. children is empty (leaf) or holds exactly four
/// quadrants in z-order: top-left, top-right, bottom-left, bottom-right.
/// A 64x64 leaf carries four 32x32 coefficient blocks (transform capped at
/// 32x32, sub-blocks in the same z-order); every other leaf carries one
/// block of CU size.
struct CodingTree {
    Rect rect;
    std::vector<CodingTree> children;
    IntraMode mode{};
    std::vector<CoeffBlock> coeffs;

    bool is_leaf() const { return children.empty(); }

    bool operator==(const CodingTree&) const = default;
};

/// Expected coefficient-block count/size for a leaf of the given CU size.
inline int coeff_blocks_per_leaf(int cu_size) { return cu_size > kMaxTransformSize ? 4 : 1; }
inline int coeff_block_size(int cu_size) {
    return cu_size > kMaxTransformSize ? kMaxTransformSize : cu_size;
}

inline void validate_tree(const CodingTree& t) {
    if (t.rect.size < kMinCuSize || t.rect.size > kCtuSize ||
        (t.rect.size & (t.rect.size - 1)) != 0)
        throw Error("coding tree rect size must be a power of two in [8,64]");
    if (t.is_leaf()) {
        if (!t.mode.valid()) throw Error("leaf mode out of range");
        const int want = coeff_blocks_per_leaf(t.rect.size);
        const int bsize = coeff_block_size(t.rect.size);
        if (static_cast<int>(t.coeffs.size()) != want)
            throw Error("leaf coefficient block count mismatch");
        for (const auto& b : t.coeffs)
            if (b.n != bsize || b.levels.size() != static_cast<std::size_t>(bsize) * bsize)
                throw Error("leaf coefficient block size mismatch");
        return;
    }
    if (t.children.size() != 4) throw Error("split node must have exactly 4 children");
    if (t.rect.size <= kMinCuSize) throw Error("8x8 coding unit cannot be split");
    const int half = t.rect.size / 2;
    const int ox[4] = {0, half, 0, half};
    const int oy[4] = {0, 0, half, half};
    for (int i = 0; i < 4; ++i) {
        const Rect want{t.rect.x + ox[i], t.rect.y + oy[i], half};
        if (t.children[i].rect != want) throw Error("split child rect mismatch");
        validate_tree(t.children[i]);
    }
}

/// Visit leaves in decode order (depth-first, z-order children).
template <typename F>
void for_each_leaf(const CodingTree& t, F&& f) {
    if (t.is_leaf()) {
        f(t);
        return;
    }
    for (const auto& c : t.children) for_each_leaf(c, f);
}

}  // namespace hvs
