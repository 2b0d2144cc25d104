#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "patternzip/bitio.hpp"
#include "patternzip/pattern.hpp"
#include "patternzip/seq_models.hpp"

namespace patternzip {

enum class GridDirection { Lower, Upper };

// tau_b = b^2 / n^e with e = 1 - eps (lower) or 1 + eps (upper), b = 1..B.
struct GridSpec {
    std::size_t n = 0;
    double eps = 0;
    GridDirection direction = GridDirection::Upper;
    double scale = 1;        // n^e
    std::uint64_t points = 0;  // B, the largest b with tau_b <= 1

    double tau(std::uint64_t b) const { return static_cast<double>(b) * static_cast<double>(b) / scale; }
    double spacing(std::uint64_t b) const { return (2.0 * static_cast<double>(b) - 1.0) / scale; }
    // Largest b with tau_b <= x, clamped to [0, B].
    std::uint64_t floor_index(double x) const;
};

GridSpec make_grid(std::size_t n, double eps, GridDirection direction);

struct QuantizedParams {
    ParamVector phi;                   // non-decreasing, sums to 1
    std::vector<std::uint64_t> index;  // grid indices of phi_1..phi_{k-1}
};

// Greedy ordered quantizer: phi_i is the grid point just below or just
// above psi_i that keeps the running sum closest to that of psi, subject
// to phi staying non-decreasing and phi_k = 1 - sum staying >= phi_{k-1}.
QuantizedParams quantize_ordered(const ParamVector& psi, const GridSpec& g);

// Elias delta of (gap + 1) for each grid index gap, starting from b = 0.
std::size_t encode_quantized(const QuantizedParams& q, BitWriter& out);
QuantizedParams decode_quantized(BitReader& in, const GridSpec& g, std::size_t k);

// Pattern model under a known multiset of probabilities without knowing
// which index gets which: every new index takes the largest unassigned
// component; the new-index event carries the unassigned mass.
class GreedyPermutationModel final : public SequentialModel {
public:
    explicit GreedyPermutationModel(ParamVector phi);
    std::unique_ptr<SequentialModel> clone() const override
    {
        return std::make_unique<GreedyPermutationModel>(*this);
    }
    std::size_t event_count() const override;
    double probability(std::size_t event) const override;
    double cumulative(std::size_t event) const override;
    void update(std::size_t event) override;

private:
    ParamVector unassigned_;  // ascending; the back is taken next
    double unassigned_mass_ = 1;
    std::vector<double> assigned_;
    std::vector<double> cum_;  // prefix sums of assigned_
};

// The payload coder for a quantized vector: exact conditionals when
// affordable for a length-n pattern, the greedy surrogate otherwise.
std::unique_ptr<SequentialModel> quantized_pattern_model(const ParamVector& phi, std::size_t n);

inline constexpr std::size_t kPatternMlEstimateLimit = 10;

// Parameter estimate the two-part coder quantizes: pattern ML for up to
// kPatternMlEstimateLimit indices, ordered empirical frequencies above.
ParamVector twopart_estimate(const Pattern& p);

struct TwoPartReport {
    std::size_t bits = 0;        // 1 + min(candidates)
    std::size_t quant_bits = 0;  // quantization candidate without selector
    std::size_t type_bits = 0;   // 0 when the type code is unavailable
    bool used_type = false;
    ParamVector estimate;
    QuantizedParams quantized;
};

TwoPartReport twopart_encode_into(const Pattern& p, double eps, BitWriter& out);
BitStream twopart_encode(const Pattern& p, double eps, TwoPartReport* report = nullptr);
Pattern twopart_decode_from(BitReader& in, std::size_t n, double eps);
Pattern twopart_decode(const BitStream& bits, std::size_t n, double eps);

// (log2 P_psi[p] - log2 P_phi[p]) / n.
double quantization_cost(const Pattern& p, const ParamVector& psi, const ParamVector& phi);

}  // namespace patternzip
