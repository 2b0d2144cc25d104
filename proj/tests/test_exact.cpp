#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "patternzip/exact_pattern.hpp"
#include "patternzip/partitions.hpp"
#include "patternzip/rng.hpp"
#include "patternzip/seq_models.hpp"

using namespace patternzip;

namespace {

bool close(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

ParamVector random_theta(std::size_t dim, CounterRng& rng)
{
    ParamVector t = sample_simplex(dim, rng);
    // Some repeated and some tiny components.
    if (dim >= 3 && rng.below(3) == 0)
        t[1] = t[0];
    if (dim >= 2 && rng.below(4) == 0)
        t[dim - 1] *= 1e-6;
    return normalized(t);
}

// Euler's pentagonal recurrence.
std::vector<BigInt> partition_numbers(std::size_t n)
{
    std::vector<BigInt> p(n + 1);
    p[0] = 1;
    for (std::size_t m = 1; m <= n; ++m) {
        BigInt s = 0;
        for (long j = 1;; ++j) {
            long g1 = j * (3 * j - 1) / 2;
            long g2 = j * (3 * j + 1) / 2;
            if (g1 > static_cast<long>(m))
                break;
            int sign = (j % 2) ? 1 : -1;
            s += sign * p[m - static_cast<std::size_t>(g1)];
            if (g2 <= static_cast<long>(m))
                s += sign * p[m - static_cast<std::size_t>(g2)];
        }
        p[m] = s;
    }
    return p;
}

double entropy_iid(const ParamVector& t)
{
    double h = 0;
    for (double x : t)
        if (x > 0)
            h -= x * std::log2(x);
    return h;
}

}  // namespace

TEST_CASE("pattern probability examples")
{
    ParamVector t{0.3, 0.7};
    for (auto f : {&pattern_prob, &pattern_prob_bruteforce, &pattern_prob_inclusion_exclusion}) {
        CHECK(f(t, Pattern{1, 1}) == doctest::Approx(0.58).epsilon(1e-12));
        CHECK(f(t, Pattern{1, 2}) == doctest::Approx(0.42).epsilon(1e-12));
        CHECK(f(ParamVector{1.0}, Pattern{1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(pattern_prob(t, Pattern{1, 2, 3}) == 0);
    CHECK_THROWS_WITH_AS(pattern_prob(ParamVector(26, 1.0 / 26), Pattern{1}), "dimension above the exact limit; use Monte Carlo", Error);
    CHECK_THROWS_AS(pattern_prob_bruteforce(ParamVector(6, 1.0 / 6), Pattern{1}), Error);
}

TEST_CASE("pattern probability equals the brute-force sum")
{
    CounterRng rng(41);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t dim = 1 + rng.below(5);
        ParamVector t = random_theta(dim, rng);
        for (std::size_t n = 1; n <= 7; ++n) {
            // One pass over all dim^n sequences, binned by pattern.
            std::map<Pattern, double> mass;
            std::vector<std::uint32_t> seq(n, 0);
            for (;;) {
                double q = 1;
                for (auto x : seq)
                    q *= t[x];
                mass[extract_pattern(seq)] += q;
                std::size_t i = 0;
                while (i < n && ++seq[i] == dim)
                    seq[i++] = 0;
                if (i == n)
                    break;
            }
            REQUIRE(mass.size() == enumerate_patterns(n, dim).size());
            for (const auto& [p, b] : mass) {
                REQUIRE(close(pattern_prob(t, p), b, 1e-10));
                // Inclusion-exclusion cancels, so only its absolute error is small.
                REQUIRE(std::abs(pattern_prob_inclusion_exclusion(t, p) - b) <= 1e-13);
                if (rep < 5)
                    REQUIRE(close(pattern_prob_bruteforce(t, p), b, 1e-10));
            }
        }
    }
}

TEST_CASE("pattern probabilities sum to one")
{
    CounterRng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        std::size_t dim = 1 + rng.below(6);
        ParamVector t = random_theta(dim, rng);
        for (std::size_t n = 1; n <= 7; ++n) {
            double s = 0;
            for (const auto& p : enumerate_patterns(n, dim))
                s += pattern_prob(t, p);
            REQUIRE(std::abs(s - 1) <= 1e-9);
        }
    }
}

TEST_CASE("pattern probability ignores the order of theta")
{
    CounterRng rng(43);
    for (int rep = 0; rep < 30; ++rep) {
        std::size_t dim = 1 + rng.below(4);
        ParamVector t = random_theta(dim, rng);
        Permutation sigma(dim);
        std::iota(sigma.begin(), sigma.end(), std::size_t{1});
        auto pats = enumerate_patterns(6, dim);
        do {
            ParamVector u = permute_params(t, sigma);
            for (const auto& p : pats)
                REQUIRE(close(pattern_prob(u, p), pattern_prob(t, p), 1e-12));
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
}

TEST_CASE("large-dimension probabilities agree with inclusion-exclusion")
{
    CounterRng rng(44);
    for (int rep = 0; rep < 20; ++rep) {
        std::size_t dim = 8 + rng.below(8);
        ParamVector t = sample_simplex(dim, rng);
        AliasSampler s(t);
        Pattern p = extract_pattern(sample_letters(s, 8 + rng.below(20), rng));
        REQUIRE(std::abs(pattern_prob(t, p) - pattern_prob_inclusion_exclusion(t, p)) <= 1e-11);
    }
}

TEST_CASE("prefix conditionals")
{
    auto c = prefix_conditionals(ParamVector{0.3, 0.7}, Pattern{1, 2});
    REQUIRE(c.size() == 2);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(0.42));
    for (double x : prefix_conditionals(ParamVector{1.0}, Pattern{1, 1, 1, 1}))
        CHECK(x == doctest::Approx(1.0));
    CHECK(prefix_conditionals(ParamVector{0.1, 0.2, 0.7}, Pattern{1})[0] == doctest::Approx(1.0));

    CounterRng rng(45);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t dim = 1 + rng.below(rep < 95 ? 12 : 20);
        ParamVector t = random_theta(dim, rng);
        AliasSampler s(t);
        Pattern p = extract_pattern(sample_letters(s, 1 + rng.below(rep < 95 ? 200 : 25), rng));
        auto cond = prefix_conditionals(t, p);
        double lp = 0;
        for (double x : cond) {
            REQUIRE(x > 0);
            REQUIRE(x <= 1 + 1e-12);
            lp += std::log2(x);
        }
        REQUIRE(std::abs(lp - pattern_log2_prob(t, p)) <= 1e-10 * std::max(1.0, std::abs(lp)));
        if (p.size() <= 7 && dim <= 5)
            REQUIRE(close(std::exp2(lp), pattern_prob_bruteforce(t, p), 1e-10));
    }
}

TEST_CASE("fixed-theta model conditionals are normalized and follow the prefix ratios")
{
    ParamVector t{0.05, 0.15, 0.3, 0.5};
    FixedThetaPatternModel m(t);
    Pattern p{1, 2, 1, 3, 4, 2};
    auto expected = prefix_conditionals(t, p);
    for (std::size_t i = 0; i < p.size(); ++i) {
        double s = 0;
        for (std::size_t e = 0; e < m.event_count(); ++e)
            s += m.probability(e);
        CHECK(std::abs(s - 1) <= 1e-12);
        CHECK(m.probability(pattern_event(p[i])) == doctest::Approx(expected[i]).epsilon(1e-10));
        m.update(pattern_event(p[i]));
    }
    CHECK(m.event_count() == 4);
    CHECK_THROWS_WITH_AS(m.update(4), "alphabet exhausted", Error);
}

TEST_CASE("pattern entropy")
{
    CHECK(pattern_entropy_exhaustive(ParamVector{0.5, 0.5}, 2) == doctest::Approx(1.0));
    CHECK(2 * entropy_iid(ParamVector{0.5, 0.5}) == doctest::Approx(2.0));
    for (std::size_t n : {1u, 5u, 12u})
        CHECK(pattern_entropy_exhaustive(ParamVector{1.0}, n) == 0);
    auto one = pattern_entropy_mc(ParamVector{1.0}, 100, 50, 1);
    CHECK(one.mean == 0);
    CHECK(one.std_error == 0);

    for (std::size_t n = 2; n <= 10; ++n) {
        double exact = pattern_entropy_exhaustive(ParamVector{0.5, 0.5}, n);
        auto mc = pattern_entropy_mc(ParamVector{0.5, 0.5}, n, 4000, n);
        CHECK(std::abs(mc.mean - exact) <= 3 * mc.std_error + 1e-12);
    }

    CounterRng rng(46);
    for (int rep = 0; rep < 10; ++rep) {
        ParamVector t = sample_simplex(2 + rng.below(10), rng);
        std::size_t n = 10 + rng.below(300);
        auto mc = pattern_entropy_mc(t, n, 200, rep);
        CHECK(mc.mean / static_cast<double>(n) <= entropy_iid(t) + 3 * mc.std_error / static_cast<double>(n));
    }
}

TEST_CASE("pattern ML estimate")
{
    auto a = pattern_ml_estimate(Pattern{1, 2});
    CHECK(a.psi[0] == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(a.psi[1] == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(std::exp2(a.log2_prob) == doctest::Approx(0.5).epsilon(1e-9));

    auto b = pattern_ml_estimate(Pattern{1, 1, 1, 1});
    CHECK(b.psi == ParamVector{1.0});
    CHECK(b.log2_prob == 0);

    // Grid oracle over the ordered 2-simplex.
    for (const Pattern& p : {Pattern{1, 2}, Pattern{1, 1, 2}, Pattern{1, 1, 2, 1, 1, 2, 1}, Pattern{1, 2, 2, 2, 2, 2, 2, 2, 1}}) {
        double best = 0;
        for (int i = 1; i <= 5000; ++i) {
            double t1 = i * 1e-4;
            best = std::max(best, pattern_prob(ParamVector{t1, 1 - t1}, p));
        }
        auto est = pattern_ml_estimate(p);
        CHECK(std::exp2(est.log2_prob) >= best - 1e-9);
        CHECK(std::exp2(est.log2_prob) == doctest::Approx(pattern_prob(est.psi, p)).epsilon(1e-12));
        CHECK(std::is_sorted(est.psi.begin(), est.psi.end()));
    }
    CHECK(std::exp2(pattern_ml_estimate(Pattern{1, 1, 2}).log2_prob) == doctest::Approx(0.25).epsilon(1e-8));

    CounterRng rng(47);
    for (int rep = 0; rep < 25; ++rep) {
        std::size_t k = 2 + rng.below(5);
        AliasSampler s(sample_simplex(k, rng));
        Pattern p = extract_pattern(sample_letters(s, 5 + rng.below(60), rng));
        auto est = pattern_ml_estimate(p);
        CHECK(est.psi.size() == distinct_count(p));
        CHECK(std::abs(std::accumulate(est.psi.begin(), est.psi.end(), 0.0) - 1) <= 1e-12);
        auto ordered = order_params(iid_ml(p)).first;
        CHECK(est.log2_prob >= pattern_log2_prob(ordered, p) - 1e-9);
    }
    CHECK_THROWS_AS(pattern_ml_estimate(extract_pattern(std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12})), Error);
}

TEST_CASE("partition counts and ranks")
{
    CHECK(partition_count(4) == 5);
    CHECK(partition_count(100) == 190569292);
    auto pn = partition_numbers(kPartitionLimit);
    for (std::size_t n = 1; n <= kPartitionLimit; ++n)
        REQUIRE(partition_count(n) == pn[n]);
    CHECK(partition_rank_bits(4) == 3);

    CHECK(partition_rank(PartitionType{1, 1, 1, 1}) == 0);
    CHECK(partition_rank(PartitionType{2, 1, 1}) == 1);
    CHECK(partition_rank(PartitionType{2, 2}) == 2);
    CHECK(partition_rank(PartitionType{3, 1}) == 3);
    CHECK(partition_rank(PartitionType{4}) == 4);

    for (std::size_t n = 1; n <= 30; ++n) {
        PartitionType prev;
        BigInt total = partition_count(n);
        for (BigInt r = 0; r < total; ++r) {
            PartitionType parts = partition_unrank(n, r);
            REQUIRE(std::accumulate(parts.begin(), parts.end(), std::uint64_t{0}) == n);
            REQUIRE(std::is_sorted(parts.rbegin(), parts.rend()));
            REQUIRE(partition_rank(parts) == r);
            if (r > 0)
                REQUIRE(std::lexicographical_compare(prev.begin(), prev.end(), parts.begin(), parts.end()));
            prev = parts;
        }
    }
    CHECK(partition_type(Pattern{1, 2, 1, 3, 1, 2}) == PartitionType{3, 2, 1});
}

TEST_CASE("type code")
{
    auto s = type_code_encode(Pattern{1, 1, 1, 1});
    CHECK(s.bit_count >= 3);
    CHECK(s.bit_count <= 5);
    BitReader r(s);
    CHECK(r.read_bits(3) == 4);
    CHECK(type_code_decode(s, 4) == Pattern{1, 1, 1, 1});

    for (std::size_t n = 1; n <= 8; ++n)
        for (const auto& p : enumerate_patterns(n, n)) {
            auto b = type_code_encode(p);
            REQUIRE(type_code_decode(b, n) == p);
            ParamVector u;
            for (auto c : occurrence_counts(p))
                u.push_back(static_cast<double>(c) / static_cast<double>(n));
            std::sort(u.begin(), u.end());
            double bound = std::log2(partition_count(n).convert_to<double>()) - pattern_log2_prob(u, p) + 3;
            REQUIRE(static_cast<double>(b.bit_count) <= bound);
        }

    CounterRng rng(48);
    for (std::size_t n : {64u, 144u, 256u})
        for (int rep = 0; rep < 10; ++rep) {
            std::size_t k = 2 + rng.below(6);
            AliasSampler src(sample_simplex(k, rng));
            Pattern p = extract_pattern(sample_letters(src, n, rng));
            REQUIRE(type_code_available(p));
            auto b = type_code_encode(p);
            REQUIRE(type_code_decode(b, n) == p);
            double dn = static_cast<double>(n);
            double red = modified_redundancy(static_cast<double>(b.bit_count), p).modified_redundancy;
            CHECK(red <= M_PI * std::sqrt(2.0 / 3) * std::log2(std::exp(1.0)) / std::sqrt(dn) + 3 / dn);
        }
}

TEST_CASE("log-probability gradient matches finite differences")
{
    CounterRng rng(49);
    for (int rep = 0; rep < 30; ++rep) {
        std::size_t dim = 2 + rng.below(8);
        ParamVector t = sample_ordered_simplex(dim, rng);
        if (rep % 3 == 0)
            t[1] = t[0];
        AliasSampler s(t);
        auto counts = occurrence_counts(extract_pattern(sample_letters(s, 20 + rng.below(200), rng)));
        PatternProbEngine engine(t);
        std::vector<double> dlog;
        double lp = engine.log_prob_gradient(counts, dlog);
        CHECK(lp == doctest::Approx(engine.log_prob(counts)).epsilon(1e-12));
        double n = std::accumulate(counts.begin(), counts.end(), 0.0);
        CHECK(std::accumulate(dlog.begin(), dlog.end(), 0.0) == doctest::Approx(n).epsilon(1e-9));
        if (rep % 3 == 0)
            CHECK(dlog[0] == doctest::Approx(dlog[1]).epsilon(1e-12));
        else
            for (std::size_t l = 0; l < dim; ++l) {
                // Scale one letter; the result is unnormalized but the
                // pattern sum stays homogeneous in each letter.
                const double h = 1e-6;
                ParamVector up = t, dn = t;
                up[l] *= std::exp(h);
                dn[l] *= std::exp(-h);
                double fd = (PatternProbEngine(up).log_prob(counts) - PatternProbEngine(dn).log_prob(counts)) / (2 * h);
                CHECK(dlog[l] == doctest::Approx(fd).epsilon(1e-5));
            }
    }
}
