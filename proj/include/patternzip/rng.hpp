#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "patternzip/pattern.hpp"

namespace patternzip {

std::uint64_t mix64(std::uint64_t x);

// Counter-based generator: output i is a fixed function of (key, i), and
// keys derive from (seed, a, b), so streams for distinct cells never depend
// on scheduling order. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;
    explicit CounterRng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }      // [0, 1)
    double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }  // (0, 1)
    std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound)

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Walker alias table for categorical sampling.
class AliasSampler {
public:
    explicit AliasSampler(const ParamVector& theta);
    std::uint32_t operator()(CounterRng& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

// Uniform point of the probability simplex (flat Dirichlet).
ParamVector sample_simplex(std::size_t k, CounterRng& rng);
// Uniform point of the ordered simplex.
ParamVector sample_ordered_simplex(std::size_t k, CounterRng& rng);
ParamVector zipf_params(std::size_t k, double s);
ParamVector uniform_params(std::size_t k);

std::vector<std::uint32_t> sample_letters(const AliasSampler& sampler, std::size_t n, CounterRng& rng);

}  // namespace patternzip
