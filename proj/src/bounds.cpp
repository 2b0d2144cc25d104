#include "patternzip/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "patternzip/rng.hpp"
#include "patternzip/simd/kernels.hpp"

namespace patternzip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
constexpr double kLog2E = std::numbers::log2e;

double log2_factorial(double m)
{
    return std::lgamma(m + 1.0) * kLog2E;
}

void check_cfg(const BoundConfig& c)
{
    if (!(c.n >= 1) || !(c.k >= 1) || !(c.eps > 0 && c.eps < 1))
        throw Error("bound needs n >= 1, k >= 1, 0 < eps < 1");
}

}  // namespace

std::string region_name(Region r)
{
    return r == Region::SmallK ? "small-k" : "large-k";
}

double minimax_threshold(double n, double eps)
{
    return std::cbrt(kPi * std::pow(n, 1 - eps) / 2);
}

double most_sources_threshold(double n, double eps)
{
    return 0.5 * std::cbrt(std::pow(n, 1 - eps) / kPi);
}

double upper_threshold(double n, double eps)
{
    return std::pow(std::sqrt(n), 1 - eps);
}

double minimax_large_k_coefficient()
{
    return std::cbrt(kPi / 2) * 1.5 * kLog2E;
}

double most_sources_large_k_coefficient()
{
    return 1.5 * kLog2E / (2 * std::cbrt(kPi));
}

double upper_large_k_coefficient()
{
    return kPi * std::sqrt(2.0 / 3.0) * kLog2E;
}

BoundReport minimax_lower_bound(const BoundConfig& c)
{
    check_cfg(c);
    BoundReport r;
    r.threshold = minimax_threshold(c.n, c.eps);
    if (c.k <= r.threshold) {
        double a = (c.k - 1) / (2 * c.n);
        r.value = a * std::log2(std::pow(c.n, 1 - c.eps) / (c.k * c.k * c.k)) + a * std::log2(kPi * kE * kE * kE / 2);
    } else {
        r.region = Region::LargeK;
        r.value = minimax_large_k_coefficient() * std::pow(c.n, -(2 + c.eps) / 3);
    }
    return r;
}

BoundReport most_sources_lower_bound(const BoundConfig& c)
{
    check_cfg(c);
    BoundReport r;
    r.threshold = most_sources_threshold(c.n, c.eps);
    if (c.k <= r.threshold) {
        double a = (c.k - 1) / (2 * c.n);
        r.value = a * std::log2(std::pow(c.n, 1 - c.eps) / (c.k * c.k * c.k)) - a * std::log2(8 * kPi / (kE * kE * kE));
    } else {
        r.region = Region::LargeK;
        r.value = most_sources_large_k_coefficient() * std::pow(c.n, -(2 + c.eps) / 3);
    }
    return r;
}

BoundReport universal_upper_bound(const BoundConfig& c)
{
    check_cfg(c);
    BoundReport r;
    r.threshold = upper_threshold(c.n, c.eps);
    if (c.k <= r.threshold) {
        r.value = (1 + c.eps) * (c.k - 1) / (2 * c.n) * std::log2(std::pow(c.n, 1 + c.eps) / (c.k * c.k));
    } else {
        r.region = Region::LargeK;
        r.dropped_terms = 1 / c.n;
        r.value = upper_large_k_coefficient() / std::sqrt(c.n) + r.dropped_terms;
    }
    return r;
}

namespace {

double sequential_core(double n, double k, double coef)
{
    return k / 2 * std::log2(n / (k * k * k)) + coef * kLog2E * k + k * k * kLog2E / (4 * n);
}

void check_nk(double n, double k)
{
    if (!(k >= 1) || !(n >= k))
        throw Error("bound needs 1 <= k <= n");
}

}  // namespace

double known_k_bound(double n, double k)
{
    check_nk(n, k);
    return sequential_core(n, k, 19.0 / 12.0) - 0.5 * std::log2(n);
}

double known_k_bound_frequent(double n, double k)
{
    check_nk(n, k);
    return sequential_core(n, k, 1.5) - 0.5 * std::log2(n);
}

double mixture_bound(double n, double k)
{
    check_nk(n, k);
    return sequential_core(n, k, 19.0 / 12.0) + 0.5 * std::log2(n * n / (k * k * k));
}

double unknown_k_bound(double n, double k, double eps)
{
    check_nk(n, k);
    if (!(eps > 0 && eps < 1))
        throw Error("eps must lie in (0, 1)");
    return sequential_core(n, k, 19.0 / 12.0 - eps) - 0.5 * std::log2(n) +
           std::pow(k, 1 - eps) / 2 * std::log2(2 * n / k) + eps * k * std::log2(k);
}

double known_k_sign_change(double n)
{
    return std::exp(19.0 / 18.0) * std::cbrt(n);
}

EntropyBound entropy_upper_bound(double n, double k_prime, double eps, double h_iid)
{
    if (!(k_prime >= 1) || !(n >= 1))
        throw Error("entropy bound needs n >= 1 and k' >= 1");
    EntropyBound b;
    b.threshold = known_k_sign_change(n);
    b.value = h_iid;
    if (k_prime > b.threshold) {
        b.reduced = true;
        b.value -= (1 - eps) * 1.5 * (k_prime / n) * std::log2(k_prime / b.threshold);
        b.correction = (k_prime * k_prime + n * std::log2(n)) / (n * n);
    }
    return b;
}

double discussion_cost(double n, double k, double eps, double beta, double delta)
{
    if (!(beta >= 1))
        throw Error("beta must be at least 1");
    return (1 + delta) * beta * std::log2(k) + (1 + delta) * std::pow(n, 1 + eps) / (2 * beta * beta) * std::log2(n);
}

double discussion_cost_optimized(double n, double k, double eps, double delta)
{
    return (1 + delta) * 1.5 * std::pow(n, (1 + eps) / 3) * std::cbrt(std::log2(n)) * std::pow(std::log2(k), 2.0 / 3.0);
}

double quantized_params_cost_bound(double n, double k, double eps, double slack)
{
    return (1 + slack) * (k - 1) / 2 * std::log2(std::pow(n, 1 + eps) / (k * k)) + 4 * (k - 1);
}

std::uint64_t count_integer_ball(double n, double eps, std::size_t k)
{
    if (k < 2)
        throw Error("ball count needs k >= 2");
    double r2 = std::pow(n, 1 - eps);
    if (k > 7 || r2 > 1.0e4 + 1e-9)
        throw Error("ball count limited to k <= 7 and n^(1-eps) <= 10^4");
    auto limit = static_cast<std::size_t>(std::floor(r2 + 1e-9));
    // ways[s]: vectors so far with sum of squares exactly s.
    std::vector<std::uint64_t> ways(limit + 1, 0), next(limit + 1);
    ways[0] = 1;
    const auto& kern = simd::kernels();
    for (std::size_t d = 0; d + 1 < k; ++d) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t b = 1; b * b <= limit; ++b)
            kern.accumulate_u64(next.data() + b * b, ways.data(), limit + 1 - b * b);
        ways.swap(next);
    }
    std::uint64_t total = 0;
    for (auto w : ways)
        total += w;
    return total;
}

double epsilon_prime(double n, double eps, std::size_t k)
{
    double radius = std::pow(std::sqrt(n), 1 - eps) - std::sqrt(static_cast<double>(k) - 1);
    if (!(radius > 0) || !(n > 1))
        return std::nan("");
    return 1 - 2 * std::log(radius) / std::log(n);
}

double ball_volume_lower_bound(double n, double eps_prime, std::size_t k)
{
    if (k < 2)
        throw Error("ball volume needs k >= 2");
    if (std::isnan(eps_prime))
        return 0.0;
    double km1 = static_cast<double>(k - 1);
    double log2_r_pow = (1 - eps_prime) * km1 / 2 * std::log2(n);  // log2 n^((1-eps')(k-1)/2)
    double lv;
    if (k % 2 == 1) {
        lv = km1 / 2 * std::log2(kPi) + log2_r_pow - log2_factorial(km1 / 2);
    } else {
        double h = (static_cast<double>(k) - 2) / 2;
        lv = log2_factorial(h) + h * std::log2(kPi) + km1 + log2_r_pow - log2_factorial(km1);
    }
    return std::exp2(lv - km1);
}

double pattern_space_volume_log2(std::size_t k)
{
    if (k < 2)
        throw Error("pattern space volume needs k >= 2");
    double kk = static_cast<double>(k);
    return -(log2_factorial(kk - 1) + log2_factorial(kk));
}

double pattern_space_volume(std::size_t k)
{
    return std::exp2(pattern_space_volume_log2(k));
}

McEstimate pattern_space_volume_mc(std::size_t k, std::size_t samples, std::uint64_t seed)
{
    if (k < 2 || samples == 0)
        throw Error("pattern space volume needs k >= 2 and samples > 0");
    std::size_t hits = 0;
    CounterRng rng(seed, 0x5653u, k);
    for (std::size_t s = 0; s < samples; ++s) {
        auto v = sample_simplex(k, rng);
        hits += std::is_sorted(v.begin(), v.end());
    }
    double simplex = std::exp2(-log2_factorial(static_cast<double>(k) - 1));
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    McEstimate e;
    e.samples = samples;
    e.mean = p * simplex;
    e.std_error = std::sqrt(p * (1 - p) / static_cast<double>(samples)) * simplex;
    return e;
}

double sphere_count_bound(double n, double k, double eps)
{
    double a = (k - 1) / 2;
    return (1 - eps) * a * std::log2(n) - a * std::log2(k * k * k) - a * std::log2(8 * kPi / (kE * kE * kE)) -
           1.5 * std::log2(k) + 0.5 * std::log2(kE * kE * kE / (4 * kPi));
}

double sphere_count_bound_exact(double n, double k, double eps)
{
    // -log2((k-1)! k! V_{k-1}(r) 2^(k-1)), r = n^(-(1-eps)/2)
    double d = k - 1;
    double log2_vol = d / 2 * std::log2(kPi) + d * (-(1 - eps) / 2) * std::log2(n) - log2_factorial(d / 2);
    return -(log2_factorial(k - 1) + log2_factorial(k) + log2_vol + d);
}

double sphere_count_maximizer(double n, double eps)
{
    return most_sources_threshold(n, eps);
}

}  // namespace patternzip
