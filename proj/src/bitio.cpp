#include "patternzip/bitio.hpp"

#include <bit>

#include "patternzip/pattern.hpp"

namespace patternzip {

std::string BitStream::to_string() const
{
    std::string s;
    s.reserve(bit_count);
    for (std::size_t i = 0; i < bit_count; ++i)
        s.push_back(bit(i) ? '1' : '0');
    return s;
}

void BitWriter::put_bit(bool b)
{
    if ((bits_ & 7) == 0)
        bytes_.push_back(0);
    if (b)
        bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7));
    ++bits_;
}

void BitWriter::put_bits(std::uint64_t value, unsigned count)
{
    while (count > 0) {
        unsigned used = bits_ & 7;
        if (used == 0)
            bytes_.push_back(0);
        unsigned room = 8 - used;
        unsigned take = count < room ? count : room;
        auto chunk = static_cast<std::uint8_t>((value >> (count - take)) & ((1u << take) - 1));
        bytes_.back() |= static_cast<std::uint8_t>(chunk << (room - take));
        bits_ += take;
        count -= take;
    }
}

void BitWriter::append(const BitStream& s)
{
    std::size_t full = s.bit_count / 8;
    if ((bits_ & 7) == 0) {
        bytes_.insert(bytes_.end(), s.bytes.begin(), s.bytes.begin() + static_cast<std::ptrdiff_t>(full));
        bits_ += full * 8;
    } else {
        for (std::size_t i = 0; i < full; ++i)
            put_byte(s.bytes[i]);
    }
    for (std::size_t i = full * 8; i < s.bit_count; ++i)
        put_bit(s.bit(i));
}

BitStream BitWriter::finish() const
{
    return BitStream{bytes_, bits_};
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_count) : bytes_(bytes), size_(bit_count)
{
    if (bit_count > bytes.size() * 8)
        throw Error("bit count exceeds buffer");
}

bool BitReader::read_bit()
{
    if (pos_ >= size_)
        throw Error("unexpected end of stream");
    bool b = (bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return b;
}

std::uint64_t BitReader::read_bits(unsigned count)
{
    if (count > remaining())
        throw Error("unexpected end of stream");
    std::uint64_t v = peek_bits_lenient(pos_, count);
    pos_ += count;
    return v;
}

std::uint64_t BitReader::peek_bits_lenient(std::size_t at, unsigned count) const
{
    std::uint64_t v = 0;
    while (count > 0) {
        std::size_t byte = at >> 3;
        unsigned offset = at & 7;
        unsigned room = 8 - offset;
        unsigned take = count < room ? count : room;
        std::uint64_t chunk = 0;
        if (at < size_) {
            chunk = (bytes_[byte] >> (room - take)) & ((1u << take) - 1);
            // Mask bits beyond the logical end.
            if (at + take > size_) {
                unsigned valid = static_cast<unsigned>(size_ - at);
                chunk &= ~((std::uint64_t{1} << (take - valid)) - 1);
            }
        }
        v = (v << take) | chunk;
        at += take;
        count -= take;
    }
    return v;
}

std::size_t elias_delta_length(std::uint64_t m)
{
    if (m == 0)
        throw Error("Elias delta needs a positive integer");
    unsigned len = static_cast<unsigned>(std::bit_width(m));
    unsigned len_len = static_cast<unsigned>(std::bit_width(len)) - 1;
    return (len - 1) + 2 * len_len + 1;
}

void elias_delta_encode(BitWriter& out, std::uint64_t m)
{
    if (m == 0)
        throw Error("Elias delta needs a positive integer");
    unsigned len = static_cast<unsigned>(std::bit_width(m));
    unsigned len_len = static_cast<unsigned>(std::bit_width(len)) - 1;
    out.put_bits(0, len_len);
    out.put_bits(len, len_len + 1);
    if (len > 1)
        out.put_bits(m, len - 1);
}

std::uint64_t elias_delta_decode(BitReader& in)
{
    unsigned zeros = 0;
    while (!in.read_bit()) {
        if (++zeros > 6)
            throw Error("Elias delta prefix too long");
    }
    std::uint64_t len = 1;
    if (zeros > 0)
        len = (std::uint64_t{1} << zeros) | in.read_bits(zeros);
    if (len > 64)
        throw Error("Elias delta value exceeds 64 bits");
    std::uint64_t m = 1;
    if (len > 1)
        m = (std::uint64_t{1} << (len - 1)) | in.read_bits(static_cast<unsigned>(len - 1));
    return m;
}

BitStream elias_delta_encode(std::uint64_t m)
{
    BitWriter w;
    elias_delta_encode(w, m);
    return w.finish();
}

std::uint64_t elias_delta_decode(const BitStream& s)
{
    BitReader r(s);
    return elias_delta_decode(r);
}

}  // namespace patternzip
