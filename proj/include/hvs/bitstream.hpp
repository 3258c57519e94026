#pragma once

#include <cstdint>
#include <vector>

#include "hvs/core.hpp"

namespace hvs {

/// MSB-first bit writer. No byte alignment between syntax elements; the
/// stream is padded with zero bits to a byte boundary only by finish().
class BitWriter {
public:
    void write_bit(std::uint32_t b) {
        const std::size_t byte = bits_ >> 3;
        if (byte == buf_.size()) buf_.push_back(0);
        if (b) buf_[byte] |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7));
        ++bits_;
    }

    void write_bits(std::uint32_t value, int nbits) {
        if (nbits < 0 || nbits > 32) throw Error("write_bits: nbits out of range [0,32]");
        if (nbits < 32 && value >= (1u << nbits)) throw Error("write_bits: value does not fit in nbits");
        for (int i = nbits - 1; i >= 0; --i) write_bit((value >> i) & 1u);
    }

    /// Exponential-Golomb order 0.
    void write_ue(std::uint32_t value) {
        if (value >= (1u << 31)) throw Error("write_ue: value out of range");
        const std::uint64_t k = static_cast<std::uint64_t>(value) + 1;
        int len = 0;
        while ((k >> len) > 1) ++len;
        write_bits(0, len);
        for (int i = len; i >= 0; --i) write_bit(static_cast<std::uint32_t>((k >> i) & 1u));
    }

    /// Signed mapping: k>0 -> 2k-1, k<=0 -> -2k, then ue.
    void write_se(std::int32_t value) {
        const std::uint32_t m =
            value > 0 ? 2u * static_cast<std::uint32_t>(value) - 1
                      : 2u * static_cast<std::uint32_t>(-static_cast<std::int64_t>(value));
        write_ue(m);
    }

    std::size_t bit_count() const { return bits_; }

    /// Pads with zero bits to a byte boundary and returns the buffer.
    std::vector<std::uint8_t> finish() {
        return std::move(buf_);  // trailing bits of the last byte are already 0
    }

private:
    std::vector<std::uint8_t> buf_;
    std::size_t bits_ = 0;
};

/// MSB-first bit reader over an external byte buffer. Reading past the end
/// throws BitstreamError, never returns silent zeros.
class BitReader {
public:
    BitReader(const std::uint8_t* data, std::size_t size) : data_(data), nbits_(size * 8) {}
    explicit BitReader(const std::vector<std::uint8_t>& bytes)
        : BitReader(bytes.data(), bytes.size()) {}

    std::uint32_t read_bit() {
        if (pos_ >= nbits_) throw BitstreamError("read past end of stream");
        const std::uint32_t b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return b;
    }

    std::uint32_t read_bits(int nbits) {
        if (nbits < 0 || nbits > 32) throw Error("read_bits: nbits out of range [0,32]");
        std::uint32_t v = 0;
        for (int i = 0; i < nbits; ++i) v = (v << 1) | read_bit();
        return v;
    }

    std::uint32_t read_ue() {
        int zeros = 0;
        while (read_bit() == 0) {
            if (++zeros >= 32) throw BitstreamError("malformed exp-Golomb prefix");
        }
        const std::uint32_t suffix = read_bits(zeros);
        return ((1u << zeros) - 1) + suffix;
    }

    std::int32_t read_se() {
        const std::uint32_t m = read_ue();
        if (m & 1u) return static_cast<std::int32_t>((m + 1) >> 1);
        return -static_cast<std::int32_t>(m >> 1);
    }

    std::size_t bit_position() const { return pos_; }
    std::size_t bits_remaining() const { return nbits_ - pos_; }

private:
    const std::uint8_t* data_;
    std::size_t nbits_;
    std::size_t pos_ = 0;
};

}  // namespace hvs
