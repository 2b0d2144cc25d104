#include "patternzip/range_coder.hpp"

namespace patternzip {

namespace {

constexpr std::uint64_t kRenormBelow = std::uint64_t{1} << 56;

using u128 = unsigned __int128;

struct Termination {
    unsigned extra_bits;
    u128 value;  // may equal 2^64 when the final carry ripples up
};

// Smallest e such that a multiple x of 2^(64-e) has [x, x + 2^(64-e)) inside
// [low, low + range).
Termination terminate(std::uint64_t low, std::uint64_t range)
{
    u128 lo = low;
    u128 hi = lo + range;
    for (unsigned e = 0; e <= 64; ++e) {
        u128 step = u128{1} << (64 - e);
        u128 x = ((lo + step - 1) / step) * step;
        if (x + step <= hi)
            return {e, x};
    }
    return {64, lo};
}

}  // namespace

void RangeEncoder::carry()
{
    std::size_t i = bytes_.size();
    while (i > 0) {
        --i;
        if (bytes_[i] != 0xFF) {
            ++bytes_[i];
            return;
        }
        bytes_[i] = 0;
    }
    throw Error("range coder carry overflow");
}

void RangeEncoder::encode(std::uint64_t cum_lo, std::uint64_t freq, std::uint64_t total)
{
    if (freq == 0 || total == 0 || total > kQuantTotal || cum_lo + freq > total)
        throw Error("invalid coding interval");
    std::uint64_t r = range_ / total;
    std::uint64_t add = r * cum_lo;
    std::uint64_t low = low_ + add;
    if (low < low_)
        carry();
    low_ = low;
    range_ = (cum_lo + freq == total) ? range_ - add : r * freq;
    while (range_ < kRenormBelow) {
        bytes_.push_back(static_cast<std::uint8_t>(low_ >> 56));
        low_ <<= 8;
        range_ <<= 8;
    }
}

std::size_t RangeEncoder::finish(BitWriter& out)
{
    Termination t = terminate(low_, range_);
    u128 x = t.value;
    if (x >> 64) {
        carry();
        x -= u128{1} << 64;
    }
    auto x64 = static_cast<std::uint64_t>(x);
    for (auto b : bytes_)
        out.put_byte(b);
    if (t.extra_bits > 0)
        out.put_bits(x64 >> (64 - t.extra_bits), t.extra_bits);
    return bytes_.size() * 8 + t.extra_bits;
}

RangeDecoder::RangeDecoder(BitReader& in) : in_(in), start_(in.position())
{
    code_ = in_.peek_bits_lenient(start_, 64);
}

std::uint64_t RangeDecoder::target(std::uint64_t total)
{
    if (total == 0 || total > kQuantTotal)
        throw Error("invalid coding total");
    std::uint64_t d = code_ - low_;
    if (d >= range_)
        throw Error("corrupt stream");
    step_ = range_ / total;
    std::uint64_t q = d / step_;
    return q < total ? q : total - 1;
}

void RangeDecoder::consume(std::uint64_t cum_lo, std::uint64_t freq, std::uint64_t total)
{
    std::uint64_t add = step_ * cum_lo;
    low_ += add;
    range_ = (cum_lo + freq == total) ? range_ - add : step_ * freq;
    while (range_ < kRenormBelow) {
        low_ <<= 8;
        range_ <<= 8;
        ++shifted_;
        code_ = (code_ << 8) | in_.peek_bits_lenient(start_ + 8 * shifted_ + 56, 8);
    }
}

void RangeDecoder::finish()
{
    Termination t = terminate(low_, range_);
    std::size_t end = start_ + 8 * shifted_ + t.extra_bits;
    if (end > in_.size())
        throw Error("unexpected end of stream");
    auto x64 = static_cast<std::uint64_t>(t.value);
    if (t.extra_bits > 0 && (code_ >> (64 - t.extra_bits)) != (x64 >> (64 - t.extra_bits)))
        throw Error("corrupt stream");
    in_.seek(end);
}

std::size_t arith_encode_into(const SequentialModel& model, const Pattern& p, BitWriter& out)
{
    auto m = model.clone();
    if (m->position() != 0)
        throw Error("model must be fresh");
    RangeEncoder enc;
    for (auto v : p) {
        std::size_t e = pattern_event(v);
        if (v == 0 || e >= m->event_count()) {
            m->update(e);
            throw Error("event outside model support");
        }
        std::uint64_t total = m->frequency_total();
        std::uint64_t lo = m->frequency_cumulative(e);
        std::uint64_t hi = m->frequency_cumulative(e + 1);
        enc.encode(lo, hi - lo, total);
        m->update(e);
    }
    return enc.finish(out);
}

BitStream arith_encode(const SequentialModel& model, const Pattern& p)
{
    BitWriter w;
    arith_encode_into(model, p, w);
    return w.finish();
}

Pattern arith_decode_from(const SequentialModel& model, BitReader& in, std::size_t n)
{
    auto m = model.clone();
    if (m->position() != 0)
        throw Error("model must be fresh");
    RangeDecoder dec(in);
    Pattern p;
    p.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t total = m->frequency_total();
        std::uint64_t target = dec.target(total);
        std::size_t lo = 0;
        std::size_t hi = m->event_count();
        while (hi - lo > 1) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (m->frequency_cumulative(mid) <= target)
                lo = mid;
            else
                hi = mid;
        }
        std::uint64_t c_lo = m->frequency_cumulative(lo);
        std::uint64_t c_hi = m->frequency_cumulative(lo + 1);
        dec.consume(c_lo, c_hi - c_lo, total);
        m->update(lo);
        p.push_back(static_cast<std::uint32_t>(lo + 1));
    }
    dec.finish();
    return p;
}

Pattern arith_decode(const SequentialModel& model, const BitStream& bits, std::size_t n)
{
    BitReader r(bits);
    return arith_decode_from(model, r, n);
}

}  // namespace patternzip
