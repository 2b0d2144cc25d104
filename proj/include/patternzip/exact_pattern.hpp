#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patternzip/pattern.hpp"
#include "patternzip/seq_models.hpp"

namespace patternzip {

inline constexpr std::size_t kExactDimLimit = 25;
inline constexpr std::size_t kPrefixDimLimit = 20;
// Largest DP state count the coders accept for exact conditionals.
inline constexpr std::size_t kCodingStateLimit = 4096;

// Number of multiset states the engine would use for theta.
std::size_t pattern_state_count(const ParamVector& theta);

// Probability that an i.i.d. theta source emits a sequence whose pattern
// has the given index counts: the sum over injections g of indices into
// letters of prod_j theta_g(j)^n_j.
//
// Letters with equal probability are grouped, and the sum is accumulated
// over multisets of used letters one index at a time. Every term is
// positive. Row and column scale factors taken from the dual of the
// maximum-weight assignment put the largest term at 1 and every entry in
// [0, 1], so nothing that matters underflows.
class PatternProbEngine {
public:
    explicit PatternProbEngine(const ParamVector& theta);

    std::size_t letters() const { return letters_; }
    std::size_t states() const { return states_; }

    // Natural log of the pattern probability; -inf when counts has more
    // entries than theta has nonzero components. Order of counts is free.
    double log_prob(std::span<const std::uint64_t> counts);

    // Conditionals of the next index given a prefix with these counts
    // (in index order): out[m] for m < counts.size(), then the new index
    // when a letter is still free. Normalized to sum 1.
    void next_conditionals(std::span<const std::uint64_t> counts, std::vector<double>& out);

    // Log probability and its derivatives with respect to log theta for
    // the positive letters in ascending order of theta; each entry is the
    // expected count landing on that letter, so they sum to n.
    double log_prob_gradient(std::span<const std::uint64_t> counts, std::vector<double>& dlog);

private:
    struct Prepared {
        double offset = 0;           // log of the removed scale
        std::vector<double> entry;   // rows x groups, scaled
        std::vector<double> unused;  // per-group exp(-v_g)
    };
    void prepare(std::span<const std::uint64_t> counts, Prepared& prep) const;
    double forward(const Prepared& prep, std::size_t rows);
    double adjoint(const Prepared& prep, std::size_t rows, std::vector<double>& grad, double* new_mass);

    std::size_t letters_ = 0;
    std::vector<double> theta_;      // group probability, ascending
    std::vector<double> log_theta_;  // group log-probability
    std::vector<std::uint32_t> size_;
    std::vector<std::size_t> stride_;
    std::size_t states_ = 1;
    std::vector<double> f_, fbar_;
    std::vector<std::uint32_t> digits_;
};

double pattern_prob(const ParamVector& theta, const Pattern& p);
double pattern_log2_prob(const ParamVector& theta, const Pattern& p);
double pattern_log2_prob_counts(const ParamVector& theta, std::span<const std::uint64_t> counts);

// Inclusion-exclusion over letter subsets (Gray-code order):
//   sum_{|S| <= r} (-1)^(r-|S|) C(K-|S|, r-|S|) prod_j (sum_{l in S} theta_l^n_j)
// Cancels badly once the terms span many orders of magnitude; kept as an
// independent route for small inputs.
double pattern_prob_inclusion_exclusion(const ParamVector& theta, const Pattern& p);

// Literal sum over all dim^n sequences with the same pattern.
double pattern_prob_bruteforce(const ParamVector& theta, const Pattern& p);

std::vector<double> prefix_conditionals(const ParamVector& theta, const Pattern& p);

// All restricted growth strings of length n with at most max_index values.
std::vector<Pattern> enumerate_patterns(std::size_t n, std::size_t max_index);

double pattern_entropy_exhaustive(const ParamVector& theta, std::size_t n);

struct McEstimate {
    double mean = 0;
    double std_error = 0;
    std::size_t samples = 0;
};

McEstimate pattern_entropy_mc(const ParamVector& theta, std::size_t n, std::size_t samples, std::uint64_t seed);

// Models the pattern under a fixed theta with exact conditionals.
class FixedThetaPatternModel final : public SequentialModel {
public:
    explicit FixedThetaPatternModel(const ParamVector& theta);
    std::unique_ptr<SequentialModel> clone() const override
    {
        return std::make_unique<FixedThetaPatternModel>(*this);
    }
    std::size_t event_count() const override { return cond_.size(); }
    double probability(std::size_t event) const override;
    double cumulative(std::size_t event) const override;
    void update(std::size_t event) override;

private:
    void refresh();
    PatternProbEngine engine_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> cond_;
    std::vector<double> cum_;
};

struct PatternMlEstimate {
    ParamVector psi;        // non-decreasing
    double log2_prob = 0;   // log2 pattern probability at psi
    bool converged = true;
};

inline constexpr std::size_t kPatternMlLimit = 12;

// Maximizes the pattern probability over ordered vectors of dimension
// equal to the number of distinct indices.
PatternMlEstimate pattern_ml_estimate(const Pattern& p);
PatternMlEstimate pattern_ml_estimate_counts(std::vector<std::uint64_t> counts);

}  // namespace patternzip
