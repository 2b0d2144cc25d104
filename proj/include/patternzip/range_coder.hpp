#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "patternzip/bitio.hpp"
#include "patternzip/pattern.hpp"
#include "patternzip/seq_models.hpp"

namespace patternzip {

// 64-bit range coder. Renormalizes a byte at a time while the range is
// below 2^56, so totals up to 2^32 keep at least 24 bits of resolution.
// Termination emits the fewest extra bits that leave the code interval
// valid for any continuation, so the output can be followed by other data.
class RangeEncoder {
public:
    void encode(std::uint64_t cum_lo, std::uint64_t freq, std::uint64_t total);
    // Appends the code to `out`; returns its length in bits.
    std::size_t finish(BitWriter& out);

private:
    void carry();
    std::uint64_t low_ = 0;
    std::uint64_t range_ = ~std::uint64_t{0};
    std::vector<std::uint8_t> bytes_;
};

class RangeDecoder {
public:
    explicit RangeDecoder(BitReader& in);
    // Value in [0, total) locating the next symbol.
    std::uint64_t target(std::uint64_t total);
    void consume(std::uint64_t cum_lo, std::uint64_t freq, std::uint64_t total);
    // Checks the termination bits and leaves the reader just past the code.
    void finish();

private:
    BitReader& in_;
    std::size_t start_;
    std::size_t shifted_ = 0;  // bytes shifted out
    std::uint64_t low_ = 0;
    std::uint64_t range_ = ~std::uint64_t{0};
    std::uint64_t code_ = 0;
    std::uint64_t step_ = 0;
};

// Codes p with a fresh copy of `model`.
BitStream arith_encode(const SequentialModel& model, const Pattern& p);
std::size_t arith_encode_into(const SequentialModel& model, const Pattern& p, BitWriter& out);
Pattern arith_decode(const SequentialModel& model, const BitStream& bits, std::size_t n);
Pattern arith_decode_from(const SequentialModel& model, BitReader& in, std::size_t n);

}  // namespace patternzip
