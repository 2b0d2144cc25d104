#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "patternzip/pattern.hpp"
#include "patternzip/rng.hpp"

namespace patternzip {

struct SourceSpec {
    enum class Prior { UniformSimplex, Zipf, Fixed, GridPoint };
    std::size_t k = 2;
    Prior prior = Prior::UniformSimplex;
    double zipf_s = 1.0;    // Zipf prior: theta_i proportional to i^-s
    ParamVector theta;      // Fixed prior
    std::size_t grid_n = 0; // GridPoint prior: lower grid for this n and eps
    double grid_eps = 0;
    std::uint64_t seed = 1;
};

ParamVector sample_theta(const SourceSpec& spec);
// Letters 0..k-1, i.i.d. from theta(spec); deterministic in (spec, seed).
std::vector<std::uint32_t> sample_sequence(const SourceSpec& spec, std::size_t n, std::uint64_t seed);
// Letters 0..k-1 in turn, so the first k symbols are all distinct.
std::vector<std::uint32_t> worst_case_sequence(std::size_t n, std::size_t k);

// Lower-grid source: b_i uniform in [1, floor(sqrt(N / k))] for i < k,
// N = n^(1-eps), sorted, theta_i = b_i^2 / N and theta_k = 1 - sum.
ParamVector grid_point_theta(std::size_t n, double eps, std::size_t k, CounterRng& rng);

// Multinomial occurrence counts of n draws from theta.
std::vector<std::uint64_t> sample_counts(const ParamVector& theta, std::size_t n, CounterRng& rng);

enum class Scheme { KnownK, Mixture, UnknownK, TwoPart, TypeCode };
std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct SweepConfig {
    std::size_t n = 1000;
    double eps = 0.1;
    std::vector<std::size_t> ks;
    std::vector<Scheme> schemes;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    bool worst_case = false;
    SourceSpec::Prior prior = SourceSpec::Prior::UniformSimplex;
    double zipf_s = 1.0;
    std::size_t mixture_cap = 4096;
    bool check_coder = false;  // also run the arithmetic coder and compare
    std::size_t threads = 0;   // 0: PATTERNZIP_THREADS or hardware
};

struct SweepRow {
    std::string scheme;
    std::size_t n = 0;
    std::size_t k = 0;  // distinct indices in the pattern
    double eps = 0;
    std::uint64_t seed = 0;
    double bits = 0;
    double neg_log_pml = 0;
    double modified_redundancy = 0;
    double bound_value = 0;  // total bits of the matching bound
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> skipped;
};

SweepResult run_sweep(const SweepConfig& cfg);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

// Worker count from PATTERNZIP_THREADS, else the hardware concurrency.
std::size_t worker_threads(std::size_t requested = 0);

struct DistinguishabilityReport {
    ParamVector theta;
    std::size_t trials = 0;
    double p_a = 0;         // any |theta_hat_i - theta_i| >= Delta(tau_b_i)/2
    double p_psi_a = 0;     // same with the ordered estimate
    double p_far = 0;       // ||theta_hat - theta|| > n^(-(1-eps)/2)
    std::vector<double> mean_abs_delta;
};

DistinguishabilityReport distinguishability_experiment(std::size_t n, std::size_t k, double eps, std::size_t trials,
                                                       std::uint64_t seed);

struct EntropyGapReport {
    std::size_t k = 0;
    std::size_t n = 0;
    double iid_bits = 0;          // n H_iid
    double pattern_entropy = 0;   // Monte Carlo, bits
    double pattern_entropy_se = 0;
    double known_k_bits = 0;      // average ideal known-k code length
    std::size_t samples = 0;
};

// Uniform source over k letters.
EntropyGapReport entropy_gap_experiment(std::size_t k, std::size_t n, std::size_t samples, std::uint64_t seed);

// Writes <prefix>.csv and <prefix>.gp (gnuplot: n R~ against k).
void emit_plot_script(const std::vector<SweepRow>& rows, const std::string& prefix);

std::vector<std::size_t> log_spaced(std::size_t lo, std::size_t hi, std::size_t count);

}  // namespace patternzip
