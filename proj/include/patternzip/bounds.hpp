#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "patternzip/exact_pattern.hpp"

namespace patternzip {

enum class Region { SmallK, LargeK };
std::string region_name(Region r);

struct BoundConfig {
    double n = 0;
    double k = 0;
    double eps = 0;
};

// Per-symbol bound; dropped_terms holds the unspecified asymptotic
// remainder, always reported as 0 except for the upper bound's 1/n.
struct BoundReport {
    double value = 0;
    Region region = Region::SmallK;
    double threshold = 0;
    double dropped_terms = 0;
};

double minimax_threshold(double n, double eps);       // (pi n^(1-eps) / 2)^(1/3)
double most_sources_threshold(double n, double eps);  // (n^(1-eps) / pi)^(1/3) / 2
double upper_threshold(double n, double eps);         // sqrt(n)^(1-eps)

double minimax_large_k_coefficient();       // (pi/2)^(1/3) * 1.5 log2 e
double most_sources_large_k_coefficient();  // 1.5 log2 e / (2 pi^(1/3))
double upper_large_k_coefficient();         // pi sqrt(2/3) log2 e

BoundReport minimax_lower_bound(const BoundConfig& cfg);
BoundReport most_sources_lower_bound(const BoundConfig& cfg);
BoundReport universal_upper_bound(const BoundConfig& cfg);

// Total bits (n times the per-symbol bound) for the sequential pattern
// coders, including the k^2 log2(e) / (4n) tail.
double known_k_bound(double n, double k);
double known_k_bound_frequent(double n, double k);
double mixture_bound(double n, double k);
double unknown_k_bound(double n, double k, double eps);

// e^(19/18) n^(1/3): above it the known-k bound turns negative.
double known_k_sign_change(double n);

struct EntropyBound {
    double value = 0;       // bits per symbol
    bool reduced = false;   // second branch taken
    double threshold = 0;
    double correction = 0;  // (k'^2 + n log2 n) / n^2, reported only
};
EntropyBound entropy_upper_bound(double n, double k_prime, double eps, double h_iid);

// Parameter representation cost for a partition point beta on the grid,
// and its minimum over beta in closed form.
double discussion_cost(double n, double k, double eps, double beta, double delta);
double discussion_cost_optimized(double n, double k, double eps, double delta);

// Length bound for the differential grid-index code of k - 1 components.
double quantized_params_cost_bound(double n, double k, double eps, double slack);

// Positive-integer vectors of dimension k - 1 with sum of squares at most
// n^(1-eps). Exact, by a dynamic program over the sum of squares.
std::uint64_t count_integer_ball(double n, double eps, std::size_t k);
// eps' with sqrt(n)^(1-eps') = sqrt(n)^(1-eps) - sqrt(k - 1); NaN when the
// right side is not positive.
double epsilon_prime(double n, double eps, std::size_t k);
// V_{k-1}(sqrt(n)^(1-eps')) / 2^(k-1), by the odd/even closed forms.
double ball_volume_lower_bound(double n, double eps_prime, std::size_t k);

double pattern_space_volume(std::size_t k);       // 1 / ((k-1)! k!)
double pattern_space_volume_log2(std::size_t k);
McEstimate pattern_space_volume_mc(std::size_t k, std::size_t samples, std::uint64_t seed);

// log2 M lower bound from sphere packing in the ordered simplex, expanded
// form with the O(1/k) term dropped.
double sphere_count_bound(double n, double k, double eps);
// Same quantity from the unexpanded factorial form.
double sphere_count_bound_exact(double n, double k, double eps);
double sphere_count_maximizer(double n, double eps);  // (n^(1-eps) / pi)^(1/3) / 2

}  // namespace patternzip
