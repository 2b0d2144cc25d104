#include "patternzip/partitions.hpp"

#include <algorithm>
#include <functional>
#include <mutex>

#include "patternzip/exact_pattern.hpp"
#include "patternzip/range_coder.hpp"

namespace patternzip {

namespace {

// table[x][m]: partitions of x into parts of size at most m (m <= x).
const std::vector<std::vector<BigInt>>& table()
{
    static const std::vector<std::vector<BigInt>> t = [] {
        std::vector<std::vector<BigInt>> t(kPartitionLimit + 1);
        for (std::size_t x = 0; x <= kPartitionLimit; ++x) {
            t[x].resize(x + 1);
            t[x][0] = x == 0 ? 1 : 0;
            for (std::size_t m = 1; m <= x; ++m) {
                std::size_t rest = x - m;
                t[x][m] = t[x][m - 1] + t[rest][std::min(m, rest)];
            }
        }
        return t;
    }();
    return t;
}

const BigInt& bounded(std::size_t x, std::size_t m)
{
    return table()[x][std::min(m, x)];
}

void check_n(std::size_t n)
{
    if (n > kPartitionLimit)
        throw Error("partition ranking limited to n <= 400");
}

ParamVector type_params(const PartitionType& parts, std::size_t n)
{
    ParamVector theta(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        theta[i] = static_cast<double>(parts[i]) / static_cast<double>(n);
    std::sort(theta.begin(), theta.end());
    return theta;
}

}  // namespace

PartitionType partition_type(const Pattern& p)
{
    if (!is_valid_pattern(p))
        throw Error("invalid pattern");
    PartitionType parts = occurrence_counts(p);
    std::sort(parts.begin(), parts.end(), std::greater<>());
    return parts;
}

BigInt partition_count(std::size_t n)
{
    check_n(n);
    return bounded(n, n);
}

BigInt partition_rank(const PartitionType& parts)
{
    std::size_t n = 0;
    for (auto a : parts) {
        if (a == 0)
            throw Error("partition parts must be positive");
        n += a;
    }
    check_n(n);
    BigInt rank = 0;
    std::size_t rest = n;
    std::size_t cap = n;
    for (auto a : parts) {
        if (a > cap)
            throw Error("partition parts must be non-increasing");
        for (std::size_t f = 1; f < a; ++f)
            rank += bounded(rest - f, f);
        rest -= a;
        cap = a;
    }
    return rank;
}

PartitionType partition_unrank(std::size_t n, const BigInt& rank)
{
    check_n(n);
    if (rank < 0 || rank >= partition_count(n))
        throw Error("partition rank out of range");
    BigInt r = rank;
    PartitionType parts;
    std::size_t rest = n;
    std::size_t cap = n;
    while (rest > 0) {
        std::size_t f = 1;
        for (;; ++f) {
            const BigInt& c = bounded(rest - f, f);
            if (r < c || f == std::min(cap, rest))
                break;
            r -= c;
        }
        parts.push_back(f);
        rest -= f;
        cap = f;
    }
    return parts;
}

std::size_t partition_rank_bits(std::size_t n)
{
    BigInt top = partition_count(n) - 1;
    return top == 0 ? 0 : boost::multiprecision::msb(top) + 1;
}

bool type_code_available(const Pattern& p)
{
    if (p.empty() || p.size() > kPartitionLimit)
        return false;
    auto parts = partition_type(p);
    if (parts.size() > kPrefixDimLimit)
        return false;
    return pattern_state_count(type_params(parts, p.size())) <= kCodingStateLimit;
}

std::size_t type_code_encode_into(const Pattern& p, BitWriter& out)
{
    if (!type_code_available(p))
        throw Error("pattern outside the type code limits");
    auto parts = partition_type(p);
    BigInt rank = partition_rank(parts);
    std::size_t width = partition_rank_bits(p.size());
    for (std::size_t i = width; i-- > 0;)
        out.put_bit(boost::multiprecision::bit_test(rank, static_cast<unsigned>(i)));
    FixedThetaPatternModel model(type_params(parts, p.size()));
    return width + arith_encode_into(model, p, out);
}

BitStream type_code_encode(const Pattern& p)
{
    BitWriter w;
    type_code_encode_into(p, w);
    return w.finish();
}

Pattern type_code_decode_from(BitReader& in, std::size_t n)
{
    if (n == 0)
        throw Error("empty pattern");
    check_n(n);
    std::size_t width = partition_rank_bits(n);
    BigInt rank = 0;
    for (std::size_t i = 0; i < width; ++i) {
        rank <<= 1;
        if (in.read_bit())
            rank |= 1;
    }
    if (rank >= partition_count(n))
        throw Error("corrupt stream");
    auto parts = partition_unrank(n, rank);
    auto theta = type_params(parts, n);
    if (parts.size() > kPrefixDimLimit || pattern_state_count(theta) > kCodingStateLimit)
        throw Error("corrupt stream");
    FixedThetaPatternModel model(theta);
    Pattern p = arith_decode_from(model, in, n);
    if (partition_type(p) != parts)
        throw Error("corrupt stream");
    return p;
}

Pattern type_code_decode(const BitStream& bits, std::size_t n)
{
    BitReader r(bits);
    return type_code_decode_from(r, n);
}

}  // namespace patternzip
