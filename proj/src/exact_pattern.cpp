#include "patternzip/exact_pattern.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "patternzip/rng.hpp"
#include "patternzip/simd/kernels.hpp"

namespace patternzip {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

std::vector<std::uint64_t> counts_of(const Pattern& p)
{
    if (!is_valid_pattern(p))
        throw Error("invalid pattern");
    return occurrence_counts(p);
}

void check_dimension(const ParamVector& theta, std::size_t limit)
{
    if (theta.empty())
        throw Error("empty parameter vector");
    if (theta.size() > limit)
        throw Error("dimension above the exact limit; use Monte Carlo");
}

}  // namespace

std::size_t pattern_state_count(const ParamVector& theta)
{
    std::vector<double> sorted;
    for (double t : theta)
        if (t > 0)
            sorted.push_back(t);
    std::sort(sorted.begin(), sorted.end());
    std::size_t states = 1;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        if (states > (std::size_t{1} << 40) / (j - i + 1))
            return std::numeric_limits<std::size_t>::max();
        states *= j - i + 1;
        i = j;
    }
    return states;
}

PatternProbEngine::PatternProbEngine(const ParamVector& theta)
{
    check_dimension(theta, kExactDimLimit);
    std::vector<double> sorted;
    for (double t : theta) {
        if (!(t >= 0) || !std::isfinite(t))
            throw Error("parameter vector has a negative or non-finite component");
        if (t > 0)
            sorted.push_back(t);
    }
    if (sorted.empty())
        throw Error("parameter vector has no positive component");
    std::sort(sorted.begin(), sorted.end());
    letters_ = sorted.size();
    for (double t : sorted) {
        if (!theta_.empty() && theta_.back() == t) {
            ++size_.back();
        } else {
            theta_.push_back(t);
            log_theta_.push_back(std::log(t));
            size_.push_back(1);
        }
    }
    stride_.resize(size_.size());
    states_ = 1;
    for (std::size_t g = 0; g < size_.size(); ++g) {
        stride_[g] = states_;
        states_ *= size_[g] + 1;
    }
    digits_.assign(size_.size(), 0);
}

void PatternProbEngine::prepare(std::span<const std::uint64_t> counts, Prepared& prep) const
{
    const std::size_t r = counts.size();
    const std::size_t big_k = letters_;
    const std::size_t groups = size_.size();

    // Rows ranked by count with K - r empty rows first; letters ranked by
    // probability. The sorted matching is a maximum-weight assignment for
    // weights n_j log theta_l, and these potentials certify it.
    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });

    std::vector<std::size_t> group_of_rank(big_k);
    {
        std::size_t t = 0;
        for (std::size_t g = 0; g < groups; ++g)
            for (std::uint32_t s = 0; s < size_[g]; ++s)
                group_of_rank[t++] = g;
    }
    auto row_count = [&](std::size_t rank) -> double {
        return rank < big_k - r ? 0.0 : static_cast<double>(counts[order[rank - (big_k - r)]]);
    };

    std::vector<double> v_rank(big_k, 0.0);
    for (std::size_t t = 1; t < big_k; ++t) {
        double dc = log_theta_[group_of_rank[t]] - log_theta_[group_of_rank[t - 1]];
        v_rank[t] = v_rank[t - 1] + (dc != 0 ? row_count(t) * dc : 0.0);
    }
    std::vector<double> v_group(groups, 0.0);
    {
        std::size_t t = 0;
        for (std::size_t g = 0; g < groups; ++g) {
            v_group[g] = v_rank[t];
            t += size_[g];
        }
    }
    std::vector<double> u_row(r);
    for (std::size_t pos = 0; pos < r; ++pos) {
        std::size_t rank = big_k - r + pos;
        u_row[order[pos]] = row_count(rank) * log_theta_[group_of_rank[rank]] - v_rank[rank];
    }

    prep.offset = 0;
    for (std::size_t j = 0; j < r; ++j)
        prep.offset += u_row[j];
    for (std::size_t g = 0; g < groups; ++g)
        prep.offset += static_cast<double>(size_[g]) * v_group[g];

    prep.entry.resize(r * groups);
    for (std::size_t j = 0; j < r; ++j) {
        double n = static_cast<double>(counts[j]);
        for (std::size_t g = 0; g < groups; ++g) {
            double x = n * log_theta_[g] - u_row[j] - v_group[g];
            prep.entry[j * groups + g] = std::exp(std::min(x, 0.0));
        }
    }
    prep.unused.resize(groups);
    for (std::size_t g = 0; g < groups; ++g)
        prep.unused[g] = std::exp(-v_group[g]);
}

double PatternProbEngine::forward(const Prepared& prep, std::size_t rows)
{
    const std::size_t groups = size_.size();
    f_.assign(states_, 0.0);
    f_[0] = 1.0;
    if (states_ == (std::size_t{1} << groups)) {
        // Distinct letters: states are subsets.
        double total = 0;
        for (std::size_t set = 0; set < states_; ++set) {
            double f = f_[set];
            if (f == 0)
                continue;
            auto level = static_cast<std::size_t>(std::popcount(set));
            if (level < rows) {
                const double* e = prep.entry.data() + level * groups;
                for (std::size_t g = 0; g < groups; ++g)
                    if (!(set >> g & 1))
                        f_[set | std::size_t{1} << g] += f * e[g];
            } else if (level == rows) {
                double w = f;
                for (std::size_t g = 0; g < groups; ++g)
                    if (!(set >> g & 1))
                        w *= prep.unused[g];
                total += w;
            }
        }
        return total;
    }
    std::fill(digits_.begin(), digits_.end(), 0u);
    std::size_t level = 0;
    double total = 0;
    for (std::size_t idx = 0; idx < states_; ++idx) {
        double f = f_[idx];
        if (f != 0) {
            if (level < rows) {
                const double* e = prep.entry.data() + level * groups;
                for (std::size_t g = 0; g < groups; ++g) {
                    std::uint32_t free = size_[g] - digits_[g];
                    if (free)
                        f_[idx + stride_[g]] += f * static_cast<double>(free) * e[g];
                }
            } else if (level == rows) {
                double w = f;
                for (std::size_t g = 0; g < groups; ++g)
                    for (std::uint32_t s = digits_[g]; s < size_[g]; ++s)
                        w *= prep.unused[g];
                total += w;
            }
        }
        for (std::size_t g = 0; g < groups; ++g) {
            if (digits_[g] < size_[g]) {
                ++digits_[g];
                ++level;
                break;
            }
            level -= digits_[g];
            digits_[g] = 0;
        }
    }
    return total;
}

double PatternProbEngine::log_prob(std::span<const std::uint64_t> counts)
{
    if (counts.size() > letters_)
        return -std::numeric_limits<double>::infinity();
    if (counts.empty())
        return 0.0;
    Prepared prep;
    prepare(counts, prep);
    double total = forward(prep, counts.size());
    return prep.offset + std::log(total);
}

double PatternProbEngine::adjoint(const Prepared& prep, std::size_t r, std::vector<double>& grad, double* new_mass)
{
    const std::size_t groups = size_.size();
    double total = forward(prep, r);
    fbar_.assign(states_, 0.0);
    grad.assign(r * groups, 0.0);
    double mass = 0;

    // Reverse sweep: fbar(S) is the derivative of the total with respect to
    // f(S); grad[j][g] collects the derivative with respect to entry[j][g].
    for (std::size_t g = 0; g < groups; ++g)
        digits_[g] = size_[g];
    std::size_t level = letters_;
    for (std::size_t idx = states_; idx-- > 0;) {
        if (level == r) {
            double w = 1.0;
            double free_mass = 0;
            for (std::size_t g = 0; g < groups; ++g) {
                std::uint32_t free = size_[g] - digits_[g];
                for (std::uint32_t s = 0; s < free; ++s)
                    w *= prep.unused[g];
                free_mass += static_cast<double>(free) * theta_[g];
            }
            fbar_[idx] = w;
            mass += f_[idx] * w * free_mass;
        } else if (level < r) {
            const double* e = prep.entry.data() + level * groups;
            double* gr = grad.data() + level * groups;
            double acc = 0;
            double f = f_[idx];
            for (std::size_t g = 0; g < groups; ++g) {
                std::uint32_t free = size_[g] - digits_[g];
                if (free) {
                    double t = static_cast<double>(free) * fbar_[idx + stride_[g]];
                    acc += e[g] * t;
                    gr[g] += f * t;
                }
            }
            fbar_[idx] = acc;
        }
        for (std::size_t g = 0; g < groups; ++g) {
            if (digits_[g] > 0) {
                --digits_[g];
                --level;
                break;
            }
            digits_[g] = size_[g];
            level += size_[g];
        }
    }
    if (new_mass)
        *new_mass = mass;
    return total;
}

void PatternProbEngine::next_conditionals(std::span<const std::uint64_t> counts, std::vector<double>& out)
{
    const std::size_t r = counts.size();
    if (r > letters_)
        throw Error("more indices than letters");
    if (r == 0) {
        out.assign(1, 1.0);
        return;
    }
    const std::size_t groups = size_.size();
    Prepared prep;
    prepare(counts, prep);
    std::vector<double> grad;
    double new_mass = 0;
    double total = adjoint(prep, r, grad, &new_mass);

    out.assign(r < letters_ ? r + 1 : r, 0.0);
    double sum = 0;
    for (std::size_t m = 0; m < r; ++m) {
        const double* e = prep.entry.data() + m * groups;
        const double* gr = grad.data() + m * groups;
        double num = 0;
        for (std::size_t g = 0; g < groups; ++g)
            num += e[g] * theta_[g] * gr[g];
        out[m] = num / total;
        sum += out[m];
    }
    if (r < letters_) {
        out[r] = new_mass / total;
        sum += out[r];
    }
    for (auto& x : out)
        x /= sum;
}

double PatternProbEngine::log_prob_gradient(std::span<const std::uint64_t> counts, std::vector<double>& dlog)
{
    const std::size_t r = counts.size();
    if (r > letters_)
        throw Error("more indices than letters");
    const std::size_t groups = size_.size();
    dlog.assign(letters_, 0.0);
    if (r == 0)
        return 0.0;
    Prepared prep;
    prepare(counts, prep);
    std::vector<double> grad;
    double total = adjoint(prep, r, grad, nullptr);

    // Expected count landing on each group, split evenly over its letters.
    std::size_t at = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        double acc = 0;
        for (std::size_t j = 0; j < r; ++j)
            acc += static_cast<double>(counts[j]) * prep.entry[j * groups + g] * grad[j * groups + g];
        double share = acc / total / static_cast<double>(size_[g]);
        for (std::uint32_t s = 0; s < size_[g]; ++s)
            dlog[at++] = share;
    }
    return prep.offset + std::log(total);
}

// ---------------------------------------------------------------------------

double pattern_log2_prob_counts(const ParamVector& theta, std::span<const std::uint64_t> counts)
{
    PatternProbEngine engine(theta);
    return engine.log_prob(counts) / kLn2;
}

double pattern_log2_prob(const ParamVector& theta, const Pattern& p)
{
    auto counts = counts_of(p);
    return pattern_log2_prob_counts(theta, counts);
}

double pattern_prob(const ParamVector& theta, const Pattern& p)
{
    auto counts = counts_of(p);
    PatternProbEngine engine(theta);
    return std::exp(engine.log_prob(counts));
}

double pattern_prob_inclusion_exclusion(const ParamVector& theta, const Pattern& p)
{
    check_dimension(theta, kExactDimLimit);
    auto counts = counts_of(p);
    const std::size_t r = counts.size();
    const std::size_t big_k = theta.size();
    if (r > big_k)
        return 0.0;
    double top = *std::max_element(theta.begin(), theta.end());
    if (!(top > 0))
        throw Error("parameter vector has no positive component");

    // column[l][j] = (theta_l / top)^n_j
    std::vector<double> column(big_k * r);
    double log_scale = 0;
    for (std::size_t j = 0; j < r; ++j)
        log_scale += static_cast<double>(counts[j]) * std::log(top);
    for (std::size_t l = 0; l < big_k; ++l)
        for (std::size_t j = 0; j < r; ++j)
            column[l * r + j] = std::pow(theta[l] / top, static_cast<double>(counts[j]));

    // coefficient by subset size s <= r: (-1)^(r-s) C(K-s, r-s)
    std::vector<double> coef(big_k + 1, 0.0);
    for (std::size_t s = 0; s <= r; ++s) {
        double c = 1;
        for (std::size_t i = 0; i < r - s; ++i)
            c = c * static_cast<double>(big_k - s - i) / static_cast<double>(i + 1);
        coef[s] = ((r - s) % 2 == 0) ? c : -c;
    }

    // Terms cancel, so rowsums, products and the running sum are carried
    // in double-double.
    const auto& kern = simd::kernels();
    std::vector<double> hi(r, 0.0), lo(r, 0.0);
    simd::DoubleDouble sum;
    std::size_t size = 0;
    std::uint64_t gray = 0;
    const std::uint64_t steps = std::uint64_t{1} << big_k;
    for (std::uint64_t i = 1; i < steps; ++i) {
        auto l = static_cast<std::size_t>(std::countr_zero(i));
        std::uint64_t bit = std::uint64_t{1} << l;
        gray ^= bit;
        double sign = (gray & bit) ? 1.0 : -1.0;
        size += (gray & bit) ? 1 : std::size_t(-1);
        simd::DoubleDouble prod = kern.rowsum_update(hi.data(), lo.data(), column.data() + l * r, sign, r);
        if (size <= r)
            sum = simd::dd_add(sum, simd::dd_mul(prod, {coef[size], 0.0}));
    }
    return (sum.hi + sum.lo) * std::exp(log_scale);
}

double pattern_prob_bruteforce(const ParamVector& theta, const Pattern& p)
{
    if (!is_valid_pattern(p))
        throw Error("invalid pattern");
    const std::size_t n = p.size();
    const std::size_t dim = theta.size();
    if (n > 10 || dim > 5)
        throw Error("brute force limited to n <= 10 and dim <= 5");
    std::vector<std::uint32_t> seq(n, 0);
    double total = 0;
    while (true) {
        if (extract_pattern(seq) == p) {
            double prob = 1;
            for (auto x : seq)
                prob *= theta[x];
            total += prob;
        }
        std::size_t i = 0;
        while (i < n && ++seq[i] == dim)
            seq[i++] = 0;
        if (i == n)
            break;
    }
    return total;
}

std::vector<double> prefix_conditionals(const ParamVector& theta, const Pattern& p)
{
    check_dimension(theta, kPrefixDimLimit);
    if (!is_valid_pattern(p))
        throw Error("invalid pattern");
    PatternProbEngine engine(theta);
    std::vector<std::uint64_t> counts;
    std::vector<double> cond;
    std::vector<double> out;
    out.reserve(p.size());
    for (auto v : p) {
        std::size_t e = v - 1;
        if (e > counts.size() || (e == counts.size() && counts.size() == engine.letters())) {
            out.push_back(0.0);
            break;
        }
        engine.next_conditionals(counts, cond);
        out.push_back(cond[e]);
        if (e == counts.size())
            counts.push_back(1);
        else
            ++counts[e];
    }
    return out;
}

namespace {

void for_each_pattern(std::size_t n, std::size_t max_index, const std::function<void(const Pattern&)>& fn)
{
    if (n == 0)
        return;
    Pattern p(n, 1);
    std::vector<std::uint32_t> top(n, 1);  // max of p[0..i]
    while (true) {
        fn(p);
        std::size_t i = n - 1;
        while (i > 0 && (p[i] > top[i - 1] || p[i] >= max_index))
            --i;
        if (i == 0)
            return;
        ++p[i];
        top[i] = std::max(top[i - 1], p[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            p[j] = 1;
            top[j] = top[i];
        }
    }
}

}  // namespace

std::vector<Pattern> enumerate_patterns(std::size_t n, std::size_t max_index)
{
    std::vector<Pattern> out;
    for_each_pattern(n, max_index, [&](const Pattern& p) { out.push_back(p); });
    return out;
}

double pattern_entropy_exhaustive(const ParamVector& theta, std::size_t n)
{
    if (n > 12)
        throw Error("exhaustive pattern entropy limited to n <= 12");
    PatternProbEngine engine(theta);
    double h = 0;
    std::vector<std::uint64_t> counts;
    for_each_pattern(n, engine.letters(), [&](const Pattern& p) {
        counts.assign(distinct_count(p), 0);
        for (auto v : p)
            ++counts[v - 1];
        double lp = engine.log_prob(counts);
        double prob = std::exp(lp);
        if (prob > 0)
            h -= prob * lp / kLn2;
    });
    return h;
}

McEstimate pattern_entropy_mc(const ParamVector& theta, std::size_t n, std::size_t samples, std::uint64_t seed)
{
    check_dimension(theta, kExactDimLimit);
    if (samples == 0 || n == 0)
        throw Error("need at least one sample of positive length");
    PatternProbEngine engine(theta);
    AliasSampler sampler(theta);
    double sum = 0, sum2 = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        CounterRng rng(seed, 0x5041u, s);
        auto letters = sample_letters(sampler, n, rng);
        auto counts = occurrence_counts(extract_pattern(letters));
        double bits = -engine.log_prob(counts) / kLn2;
        sum += bits;
        sum2 += bits * bits;
    }
    McEstimate est;
    est.samples = samples;
    est.mean = sum / static_cast<double>(samples);
    if (samples > 1) {
        double var = (sum2 - sum * est.mean) / static_cast<double>(samples - 1);
        est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    }
    return est;
}

// ---------------------------------------------------------------------------

FixedThetaPatternModel::FixedThetaPatternModel(const ParamVector& theta) : engine_(theta)
{
    check_dimension(theta, kPrefixDimLimit);
    refresh();
}

void FixedThetaPatternModel::refresh()
{
    engine_.next_conditionals(counts_, cond_);
    cum_.resize(cond_.size() + 1);
    cum_[0] = 0;
    for (std::size_t i = 0; i < cond_.size(); ++i)
        cum_[i + 1] = cum_[i] + cond_[i];
}

double FixedThetaPatternModel::probability(std::size_t event) const
{
    if (event >= cond_.size()) {
        if (event == counts_.size())
            throw Error("alphabet exhausted");
        throw Error("index skips the next available value");
    }
    return cond_[event];
}

double FixedThetaPatternModel::cumulative(std::size_t event) const
{
    return event >= cond_.size() ? 1.0 : cum_[event];
}

void FixedThetaPatternModel::update(std::size_t event)
{
    if (event >= cond_.size()) {
        if (event == counts_.size())
            throw Error("alphabet exhausted");
        throw Error("index skips the next available value");
    }
    if (event == counts_.size())
        counts_.push_back(1);
    else
        ++counts_[event];
    ++consumed_;
    refresh();
}

}  // namespace patternzip
