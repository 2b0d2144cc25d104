#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace patternzip {

// Bits in emission order, most significant bit of each byte first; the
// last byte is zero-padded.
struct BitStream {
    std::vector<std::uint8_t> bytes;
    std::size_t bit_count = 0;

    bool bit(std::size_t i) const { return (bytes[i >> 3] >> (7 - (i & 7))) & 1; }
    std::string to_string() const;
};

class BitWriter {
public:
    void put_bit(bool b);
    // Low `count` bits of value, most significant first; count <= 64.
    void put_bits(std::uint64_t value, unsigned count);
    void put_byte(std::uint8_t b) { put_bits(b, 8); }
    void append(const BitStream& s);
    std::size_t bit_count() const { return bits_; }
    BitStream finish() const;
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t bits_ = 0;
};

class BitReader {
public:
    BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_count);
    explicit BitReader(const BitStream& s) : BitReader(s.bytes, s.bit_count) {}

    // Strict reads throw "unexpected end of stream" past the end.
    bool read_bit();
    std::uint64_t read_bits(unsigned count);

    // Lenient reads return zeros past the end.
    std::uint64_t peek_bits_lenient(std::size_t at, unsigned count) const;

    std::size_t position() const { return pos_; }
    std::size_t size() const { return size_; }
    std::size_t remaining() const { return pos_ < size_ ? size_ - pos_ : 0; }
    void seek(std::size_t pos) { pos_ = pos; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::size_t elias_delta_length(std::uint64_t m);
void elias_delta_encode(BitWriter& out, std::uint64_t m);
std::uint64_t elias_delta_decode(BitReader& in);

BitStream elias_delta_encode(std::uint64_t m);
std::uint64_t elias_delta_decode(const BitStream& s);

}  // namespace patternzip
