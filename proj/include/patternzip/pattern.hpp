#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace patternzip {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Token = std::string;
using Sequence = std::vector<Token>;

// Index sequence in order of first occurrence; values start at 1.
using Pattern = std::vector<std::uint32_t>;

using ParamVector = std::vector<double>;

// 1-based: component i of a permuted vector is theta[sigma[i] - 1].
using Permutation = std::vector<std::size_t>;

using OccurrenceCounts = std::vector<std::uint64_t>;

enum class TokenMode { Bytes, Words };

Sequence tokenize(std::string_view data, TokenMode mode);
std::string join_tokens(const Sequence& seq);

Pattern extract_pattern(const Sequence& seq);
Pattern extract_pattern(const std::vector<std::uint32_t>& letters);

bool is_valid_pattern(const std::vector<std::int64_t>& indices);
bool is_valid_pattern(const Pattern& p);

// Number of distinct indices (the maximum index).
std::size_t distinct_count(const Pattern& p);

Sequence canonical_sequence(const Pattern& p);

// Stable: ties keep their original order.
std::pair<ParamVector, Permutation> order_params(const ParamVector& theta);
ParamVector permute_params(const ParamVector& theta, const Permutation& sigma);

OccurrenceCounts occurrence_counts(const Pattern& p);
// C_i for i = 1..n: distinct indices among the first i symbols.
std::vector<std::uint32_t> prefix_distinct_counts(const Pattern& p);

ParamVector iid_ml(const Pattern& p);

double l2_distance(const ParamVector& a, const ParamVector& b);

// Throws unless components are nonnegative and sum to 1 within 1e-12.
void check_param_vector(const ParamVector& theta);
ParamVector normalized(ParamVector theta);

}  // namespace patternzip
