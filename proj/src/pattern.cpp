#include "patternzip/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace patternzip {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

Sequence tokenize(std::string_view data, TokenMode mode)
{
    Sequence out;
    if (mode == TokenMode::Bytes) {
        out.reserve(data.size());
        for (char c : data)
            out.emplace_back(1, c);
        return out;
    }
    // Alternating runs of whitespace and non-whitespace, so joining the
    // tokens reproduces the input exactly.
    std::size_t i = 0;
    while (i < data.size()) {
        bool ws = is_space(static_cast<unsigned char>(data[i]));
        std::size_t j = i + 1;
        while (j < data.size() && is_space(static_cast<unsigned char>(data[j])) == ws)
            ++j;
        out.emplace_back(data.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string join_tokens(const Sequence& seq)
{
    std::size_t total = 0;
    for (const auto& t : seq)
        total += t.size();
    std::string out;
    out.reserve(total);
    for (const auto& t : seq)
        out += t;
    return out;
}

Pattern extract_pattern(const Sequence& seq)
{
    if (seq.empty())
        throw Error("empty sequence");
    std::unordered_map<std::string_view, std::uint32_t> index;
    index.reserve(64);
    Pattern p;
    p.reserve(seq.size());
    for (const auto& tok : seq) {
        auto [it, fresh] = index.try_emplace(tok, static_cast<std::uint32_t>(index.size() + 1));
        p.push_back(it->second);
    }
    return p;
}

Pattern extract_pattern(const std::vector<std::uint32_t>& letters)
{
    if (letters.empty())
        throw Error("empty sequence");
    std::uint32_t top = *std::max_element(letters.begin(), letters.end());
    Pattern p;
    p.reserve(letters.size());
    std::uint32_t next = 1;
    if (top < (1u << 24)) {
        std::vector<std::uint32_t> index(static_cast<std::size_t>(top) + 1, 0);
        for (auto x : letters) {
            if (index[x] == 0)
                index[x] = next++;
            p.push_back(index[x]);
        }
        return p;
    }
    std::unordered_map<std::uint32_t, std::uint32_t> index;
    for (auto x : letters) {
        auto [it, fresh] = index.try_emplace(x, next);
        if (fresh)
            ++next;
        p.push_back(it->second);
    }
    return p;
}

bool is_valid_pattern(const std::vector<std::int64_t>& indices)
{
    if (indices.empty())
        return false;
    std::int64_t top = 0;
    for (auto v : indices) {
        if (v < 1 || v > top + 1)
            return false;
        top = std::max(top, v);
    }
    return true;
}

bool is_valid_pattern(const Pattern& p)
{
    if (p.empty())
        return false;
    std::uint32_t top = 0;
    for (auto v : p) {
        if (v < 1 || v > top + 1)
            return false;
        top = std::max(top, v);
    }
    return true;
}

std::size_t distinct_count(const Pattern& p)
{
    std::uint32_t top = 0;
    for (auto v : p)
        top = std::max(top, v);
    return top;
}

Sequence canonical_sequence(const Pattern& p)
{
    Sequence s;
    s.reserve(p.size());
    for (auto v : p)
        s.push_back(std::to_string(v));
    return s;
}

std::pair<ParamVector, Permutation> order_params(const ParamVector& theta)
{
    Permutation sigma(theta.size());
    std::iota(sigma.begin(), sigma.end(), std::size_t{1});
    std::stable_sort(sigma.begin(), sigma.end(),
                     [&](std::size_t a, std::size_t b) { return theta[a - 1] < theta[b - 1]; });
    return {permute_params(theta, sigma), sigma};
}

ParamVector permute_params(const ParamVector& theta, const Permutation& sigma)
{
    if (sigma.size() != theta.size())
        throw Error("permutation size does not match parameter vector");
    std::vector<bool> seen(sigma.size(), false);
    ParamVector out(theta.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        std::size_t s = sigma[i];
        if (s < 1 || s > sigma.size() || seen[s - 1])
            throw Error("permutation is not a bijection");
        seen[s - 1] = true;
        out[i] = theta[s - 1];
    }
    return out;
}

OccurrenceCounts occurrence_counts(const Pattern& p)
{
    OccurrenceCounts counts;
    for (auto v : p) {
        if (v > counts.size())
            counts.resize(v, 0);
        ++counts[v - 1];
    }
    return counts;
}

std::vector<std::uint32_t> prefix_distinct_counts(const Pattern& p)
{
    std::vector<std::uint32_t> out;
    out.reserve(p.size());
    std::uint32_t top = 0;
    for (auto v : p) {
        top = std::max(top, v);
        out.push_back(top);
    }
    return out;
}

ParamVector iid_ml(const Pattern& p)
{
    auto counts = occurrence_counts(p);
    ParamVector out(counts.size());
    double n = static_cast<double>(p.size());
    for (std::size_t j = 0; j < counts.size(); ++j)
        out[j] = static_cast<double>(counts[j]) / n;
    return out;
}

double l2_distance(const ParamVector& a, const ParamVector& b)
{
    if (a.size() != b.size())
        throw Error("dimension mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void check_param_vector(const ParamVector& theta)
{
    if (theta.empty())
        throw Error("empty parameter vector");
    double s = 0;
    for (double t : theta) {
        if (!(t >= 0) || !std::isfinite(t))
            throw Error("parameter vector has a negative or non-finite component");
        s += t;
    }
    if (std::abs(s - 1) > 1e-12)
        throw Error("parameter vector does not sum to 1");
}

ParamVector normalized(ParamVector theta)
{
    double s = std::accumulate(theta.begin(), theta.end(), 0.0);
    if (!(s > 0))
        throw Error("cannot normalize a zero vector");
    for (auto& t : theta)
        t /= s;
    return theta;
}

}  // namespace patternzip
