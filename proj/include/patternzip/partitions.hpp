#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "patternzip/bitio.hpp"
#include "patternzip/pattern.hpp"

namespace patternzip {

using BigInt = boost::multiprecision::cpp_int;

// Parts in non-increasing order.
using PartitionType = std::vector<std::uint64_t>;

inline constexpr std::size_t kPartitionLimit = 400;

PartitionType partition_type(const Pattern& p);
BigInt partition_count(std::size_t n);
// Rank in lexicographic order of the part lists, so (1,...,1) has rank 0
// and (n) has rank p(n) - 1.
BigInt partition_rank(const PartitionType& parts);
PartitionType partition_unrank(std::size_t n, const BigInt& rank);

// Bits needed for a rank in [0, p(n)).
std::size_t partition_rank_bits(std::size_t n);

// Type code: the partition rank in fixed width, then the pattern coded
// under the ordered empirical frequencies. Available when n is within
// kPartitionLimit and the exact conditionals are affordable.
bool type_code_available(const Pattern& p);
std::size_t type_code_encode_into(const Pattern& p, BitWriter& out);
BitStream type_code_encode(const Pattern& p);
Pattern type_code_decode_from(BitReader& in, std::size_t n);
Pattern type_code_decode(const BitStream& bits, std::size_t n);

}  // namespace patternzip
