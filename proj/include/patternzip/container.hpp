#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patternzip/pattern.hpp"
#include "patternzip/seq_models.hpp"

namespace patternzip {

enum class ModelId : std::uint8_t { KnownK = 1, Mixture = 2, UnknownK = 3, TwoPart = 4 };

ModelId parse_model_id(std::string_view name);
std::string model_name(ModelId id);

// eps is carried as a numerator over 2^16.
inline constexpr std::uint32_t kEpsDenominator = 1u << 16;
// Decimal string to the nearest numerator, exact in decimal; must land in (0, 2^16).
std::uint16_t parse_eps_fixed(std::string_view decimal);
std::uint16_t eps_to_fixed(double eps);
inline double fixed_to_eps(std::uint16_t num) { return static_cast<double>(num) / kEpsDenominator; }

struct CompressOptions {
    ModelId model = ModelId::UnknownK;
    std::uint16_t eps_fixed = 6554;  // 0.1
    std::size_t mixture_cap = PatternMixtureModel::kDefaultCap;
    TokenMode tokens = TokenMode::Bytes;
};

struct CompressResult {
    std::vector<std::uint8_t> bytes;
    std::size_t header_bits = 0;   // before byte alignment
    std::size_t payload_bits = 0;
    double ideal_bits = 0;         // -log2 Q for the arithmetic models
    CodeLengthReport report;       // on payload_bits
};

// Model an arithmetic-coded container would use for a pattern of length n
// with k distinct indices. Not defined for the two-part code.
std::unique_ptr<SequentialModel> container_model(ModelId id, std::size_t n, std::size_t k, std::uint16_t eps_fixed,
                                                 std::size_t mixture_cap);

CompressResult compress_sequence(const Sequence& seq, const CompressOptions& opt);
CompressResult compress(std::string_view data, const CompressOptions& opt);
Sequence decompress_sequence(std::span<const std::uint8_t> bytes);
std::string decompress(std::span<const std::uint8_t> bytes);

}  // namespace patternzip
