#include "patternzip/rng.hpp"

#include <algorithm>
#include <cmath>

namespace patternzip {

std::uint64_t mix64(std::uint64_t x)
{
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    key_ = mix64(mix64(seed ^ 0x243F6A8885A308D3ull) ^ mix64(a + 0x13198A2E03707344ull) ^
                 mix64(b + 0xA4093822299F31D0ull) * 3);
}

std::uint64_t CounterRng::below(std::uint64_t bound)
{
    if (bound <= 1)
        return 0;
    // Lemire's multiply-shift with rejection.
    using u128 = unsigned __int128;
    std::uint64_t x = (*this)();
    u128 m = static_cast<u128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        std::uint64_t t = (0 - bound) % bound;
        while (low < t) {
            x = (*this)();
            m = static_cast<u128>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

AliasSampler::AliasSampler(const ParamVector& theta)
{
    std::size_t k = theta.size();
    if (k == 0)
        throw Error("empty parameter vector");
    prob_.assign(k, 0);
    alias_.assign(k, 0);
    double total = 0;
    for (double t : theta)
        total += t;
    std::vector<double> scaled(k);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < k; ++i) {
        scaled[i] = theta[i] / total * static_cast<double>(k);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back();
        small.pop_back();
        std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (auto i : large) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
    for (auto i : small) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
}

std::uint32_t AliasSampler::operator()(CounterRng& rng) const
{
    std::uint64_t x = rng();
    auto column = static_cast<std::uint32_t>((static_cast<unsigned __int128>(x) * prob_.size()) >> 64);
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u < prob_[column] ? column : alias_[column];
}

ParamVector sample_simplex(std::size_t k, CounterRng& rng)
{
    ParamVector v(k);
    double s = 0;
    for (auto& x : v) {
        x = -std::log(rng.uniform_open());
        s += x;
    }
    for (auto& x : v)
        x /= s;
    return v;
}

ParamVector sample_ordered_simplex(std::size_t k, CounterRng& rng)
{
    ParamVector v = sample_simplex(k, rng);
    std::sort(v.begin(), v.end());
    return v;
}

ParamVector zipf_params(std::size_t k, double s)
{
    ParamVector v(k);
    double total = 0;
    for (std::size_t i = 0; i < k; ++i) {
        v[i] = std::pow(static_cast<double>(i + 1), -s);
        total += v[i];
    }
    for (auto& x : v)
        x /= total;
    return v;
}

ParamVector uniform_params(std::size_t k)
{
    return ParamVector(k, 1.0 / static_cast<double>(k));
}

std::vector<std::uint32_t> sample_letters(const AliasSampler& sampler, std::size_t n, CounterRng& rng)
{
    std::vector<std::uint32_t> out(n);
    for (auto& x : out)
        x = sampler(rng);
    return out;
}

}  // namespace patternzip
