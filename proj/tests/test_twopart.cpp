#include <doctest.h>

#include <cmath>
#include <numeric>

#include "patternzip/bounds.hpp"
#include "patternzip/exact_pattern.hpp"
#include "patternzip/partitions.hpp"
#include "patternzip/rng.hpp"
#include "patternzip/twopart.hpp"

using namespace patternzip;

namespace {

Pattern random_pattern(std::size_t n, std::size_t k, CounterRng& rng)
{
    AliasSampler s(sample_simplex(k, rng));
    return extract_pattern(sample_letters(s, n, rng));
}

void check_displacement(const ParamVector& psi, const QuantizedParams& q, const GridSpec& g)
{
    std::size_t k = psi.size();
    REQUIRE(q.phi.size() == k);
    REQUIRE(q.index.size() == k - 1);
    REQUIRE(std::abs(std::accumulate(q.phi.begin(), q.phi.end(), 0.0) - 1) <= 1e-12);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        REQUIRE(q.phi[i] == g.tau(q.index[i]));
        REQUIRE(std::abs(psi[i] - q.phi[i]) <= g.spacing(q.index[i] + 1) + 1e-15);
        REQUIRE(q.phi[i] <= q.phi[i + 1] + 1e-15);
    }
    double last = std::abs(psi[k - 1] - q.phi[k - 1]);
    REQUIRE(last <= 2.5 * std::sqrt(q.phi[k - 1]) / std::sqrt(g.scale) + 1e-15);
}

}  // namespace

TEST_CASE("grid construction")
{
    auto lo = make_grid(10000, 0, GridDirection::Lower);
    CHECK(lo.tau(1) == doctest::Approx(1e-4));
    CHECK(lo.tau(2) == doctest::Approx(4e-4));
    CHECK(lo.tau(3) == doctest::Approx(9e-4));
    CHECK(lo.spacing(2) == doctest::Approx(3 / lo.scale));
    CHECK(lo.spacing(2) >= std::sqrt(lo.tau(2)) / std::sqrt(lo.scale));

    auto up = make_grid(10000, 0, GridDirection::Upper);
    CHECK(up.points == 100);
    CHECK(up.tau(up.points) <= 1.0);
    for (std::size_t n : {2u, 17u, 1000u, 123457u})
        for (double eps : {0.0, 0.1, 0.5, 0.9})
            for (auto dir : {GridDirection::Lower, GridDirection::Upper}) {
                auto g = make_grid(n, eps, dir);
                double e = dir == GridDirection::Lower ? 1 - eps : 1 + eps;
                CHECK(g.scale == doctest::Approx(std::pow(static_cast<double>(n), e)));
                CHECK(g.points == static_cast<std::uint64_t>(std::floor(std::sqrt(g.scale) + 1e-9)));
                for (std::uint64_t b = 1; b <= std::min<std::uint64_t>(g.points, 50); ++b) {
                    CHECK(g.floor_index(g.tau(b)) == b);
                    CHECK(std::round(std::sqrt(g.tau(b) * g.scale)) == static_cast<double>(b));
                    if (dir == GridDirection::Lower)
                        CHECK(g.spacing(b) >= std::sqrt(g.tau(b)) / std::sqrt(g.scale) - 1e-15);
                }
            }
    CHECK_THROWS_AS(make_grid(1, 0.1, GridDirection::Upper), Error);
    CHECK_THROWS_AS(make_grid(10, 1.0, GridDirection::Upper), Error);
}

TEST_CASE("quantizer examples")
{
    auto g = make_grid(10000, 0, GridDirection::Upper);
    ParamVector on{g.tau(3), g.tau(10), 1 - g.tau(3) - g.tau(10)};
    auto q = quantize_ordered(on, g);
    CHECK(q.index == std::vector<std::uint64_t>{3, 10});
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(q.phi[i] == doctest::Approx(on[i]).epsilon(1e-14));

    // k = 2: the better of the two surrounding grid points.
    CounterRng rng(51);
    ParamVector cases{0.00025, 0.0001, 0.3, 0.4999, 0.5, 1e-7};
    for (int i = 0; i < 200; ++i)
        cases.push_back(0.5 * rng.uniform());
    for (double x : cases) {
        ParamVector psi{x, 1 - x};
        auto r = quantize_ordered(psi, g);
        std::uint64_t lo = std::max<std::uint64_t>(g.floor_index(x), 1);
        double best = -1;
        double best_err = 1e300;
        for (std::uint64_t b : {lo, lo + 1}) {
            if (b > g.points || g.tau(b) > 1 - g.tau(b))
                continue;
            double err = std::abs(x - g.tau(b));
            if (err < best_err) {
                best_err = err;
                best = g.tau(b);
            }
        }
        CHECK(r.phi[0] == best);
    }
    // Equidistant from both neighbours; the lower one wins the tie.
    auto r = quantize_ordered(ParamVector{0.00025, 0.99975}, g);
    CHECK(r.phi[0] == doctest::Approx(1e-4));
}

TEST_CASE("quantizer displacement bounds")
{
    CounterRng rng(52);
    for (std::size_t n : {1000u, 10000u, 100000u})
        for (double eps : {0.0, 0.1}) {
            auto g = make_grid(n, eps, GridDirection::Upper);
            for (int rep = 0; rep < 10000; ++rep) {
                std::size_t k = 2 + rng.below(static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)) / 2));
                ParamVector psi = sample_ordered_simplex(k, rng);
                check_displacement(psi, quantize_ordered(psi, g), g);
            }
        }
}

TEST_CASE("quantized parameter code")
{
    auto g = make_grid(10000, 0, GridDirection::Upper);
    QuantizedParams q = quantize_ordered(ParamVector{g.tau(7), 1 - g.tau(7)}, g);
    BitWriter w;
    CHECK(encode_quantized(q, w) == 8);

    q = quantize_ordered(ParamVector{g.tau(1), g.tau(1), g.tau(1), 1 - 3 * g.tau(1)}, g);
    BitWriter w2;
    std::size_t bits = encode_quantized(q, w2);
    CHECK(bits == elias_delta_length(2) + 2 * elias_delta_length(1));

    CounterRng rng(53);
    for (int rep = 0; rep < 1000; ++rep) {
        std::size_t n = 2 + rng.below(100000);
        double eps = 0.5 * rng.uniform();
        auto gg = make_grid(n, eps, GridDirection::Upper);
        std::size_t k = 2 + rng.below(std::max<std::uint64_t>(1, std::min<std::uint64_t>(gg.points / 2, 40)));
        auto qq = quantize_ordered(sample_ordered_simplex(k, rng), gg);
        BitWriter out;
        std::size_t len = encode_quantized(qq, out);
        BitStream s = out.finish();
        REQUIRE(s.bit_count == len);
        BitReader r(s);
        auto back = decode_quantized(r, gg, k);
        REQUIRE(back.index == qq.index);
        for (std::size_t i = 0; i < k; ++i)
            REQUIRE(back.phi[i] == doctest::Approx(qq.phi[i]).epsilon(1e-14));
        double dk = static_cast<double>(k);
        if (dk <= std::sqrt(static_cast<double>(n)))
            REQUIRE(static_cast<double>(len) <= quantized_params_cost_bound(static_cast<double>(n), dk, eps, 0.0) + 4 * (dk - 1));
    }

    // Index past the grid.
    BitWriter bad;
    elias_delta_encode(bad, 1000);
    BitStream s = bad.finish();
    BitReader r(s);
    CHECK_THROWS_AS(decode_quantized(r, g, 2), Error);
}

TEST_CASE("greedy permutation model")
{
    GreedyPermutationModel m(ParamVector{0.1, 0.2, 0.7});
    CHECK(m.event_count() == 1);
    CHECK(m.probability(0) == doctest::Approx(1.0));
    m.update(0);  // index 1 takes 0.7
    CHECK(m.probability(0) == doctest::Approx(0.7));
    CHECK(m.probability(1) == doctest::Approx(0.3));
    m.update(1);  // index 2 takes 0.2
    CHECK(m.probability(1) == doctest::Approx(0.2));
    CHECK(m.probability(2) == doctest::Approx(0.1));
    m.update(2);
    CHECK(m.event_count() == 3);
    CHECK_THROWS_AS(m.update(3), Error);

    CounterRng rng(54);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t k = 1 + rng.below(200);
        ParamVector phi = sample_ordered_simplex(k, rng);
        Pattern p = random_pattern(1 + rng.below(1000), k, rng);
        GreedyPermutationModel g(phi);
        for (auto v : p) {
            double s = 0;
            for (std::size_t e = 0; e < g.event_count(); ++e)
                s += g.probability(e);
            REQUIRE(std::abs(s - 1) <= 1e-12);
            g.update(pattern_event(v));
        }
    }
}

TEST_CASE("two-part code examples")
{
    TwoPartReport rep;
    // A single index needs only the selector and Elias(1).
    auto s = twopart_encode(Pattern(100, 1), 0.1, &rep);
    CHECK(s.bit_count == rep.bits);
    CHECK(rep.bits == 2);
    CHECK_FALSE(rep.used_type);
    CHECK(rep.type_bits >= partition_rank_bits(100));
    CHECK(twopart_decode(s, 100, 0.1) == Pattern(100, 1));
    CHECK_THROWS_AS(twopart_encode(Pattern{1}, 0.0), Error);
    CHECK_THROWS_AS(twopart_encode(Pattern{1}, 1.0), Error);
}

TEST_CASE("two-part round trip")
{
    for (std::size_t n = 1; n <= 8; ++n)
        for (const auto& p : enumerate_patterns(n, n)) {
            TwoPartReport rep;
            auto s = twopart_encode(p, 0.1, &rep);
            REQUIRE(s.bit_count == rep.bits);
            std::size_t best = rep.type_bits > 0 ? std::min(rep.type_bits, rep.quant_bits) : rep.quant_bits;
            REQUIRE(rep.bits == 1 + best);
            REQUIRE(twopart_decode(s, n, 0.1) == p);
        }

    CounterRng rng(55);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = 2 + rng.below(rep < 40 ? 500 : 5000);
        std::size_t k = 1 + rng.below(rep % 3 == 0 ? 60 : 10);
        Pattern p = random_pattern(n, k, rng);
        double eps = 0.05 + 0.5 * rng.uniform();
        TwoPartReport r;
        auto s = twopart_encode(p, eps, &r);
        std::size_t best = r.type_bits > 0 ? std::min(r.type_bits, r.quant_bits) : r.quant_bits;
        REQUIRE(r.bits == 1 + best);
        REQUIRE(s.bit_count == r.bits);
        REQUIRE(twopart_decode(s, n, eps) == p);
    }
}

TEST_CASE("pattern ML estimate never loses more than a bit to the empirical estimate")
{
    CounterRng rng(56);
    for (int rep = 0; rep < 20; ++rep) {
        std::size_t k = 2 + rng.below(6);
        Pattern p = random_pattern(200 + rng.below(300), k, rng);
        std::size_t kk = distinct_count(p);
        if (kk < 2)
            continue;
        auto g = make_grid(p.size(), 0.1, GridDirection::Upper);
        auto cost = [&](const ParamVector& est) {
            auto q = quantize_ordered(est, g);
            BitWriter w;
            return static_cast<double>(encode_quantized(q, w)) - pattern_log2_prob(q.phi, p);
        };
        ParamVector emp = order_params(iid_ml(p)).first;
        CHECK(cost(twopart_estimate(p)) <= cost(emp) + 1);
    }
}

TEST_CASE("quantization cost")
{
    Pattern p{1, 2, 1, 1, 3, 2};
    ParamVector psi{0.2, 0.3, 0.5};
    CHECK(quantization_cost(p, psi, psi) == 0);
    CHECK(quantization_cost(Pattern(10, 1), ParamVector{1.0}, ParamVector{1.0}) == 0);

    CounterRng rng(57);
    const std::size_t n = 512;
    auto g = make_grid(n, 0.1, GridDirection::Upper);
    double cost = 0;
    double param_bits = 0;
    int used = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Pattern q = random_pattern(n, 8, rng);
        ParamVector est = twopart_estimate(q);
        if (est.size() < 2)
            continue;
        auto quant = quantize_ordered(est, g);
        BitWriter w;
        param_bits += static_cast<double>(encode_quantized(quant, w)) / n;
        cost += quantization_cost(q, est, quant.phi);
        ++used;
    }
    CHECK(used > 90);
    CHECK(cost / used <= 0.1 * param_bits / used);
}

TEST_CASE("two-part redundancy against the pattern entropy")
{
    const std::size_t n = 1024;
    const std::size_t k = 10;
    const double eps = 0.1;
    ParamVector theta = uniform_params(k);
    auto h = pattern_entropy_mc(theta, n, 200, 58);
    CounterRng rng(58);
    AliasSampler src(theta);
    double bits = 0;
    const int samples = 20;
    for (int i = 0; i < samples; ++i) {
        Pattern p = extract_pattern(sample_letters(src, n, rng));
        bits += static_cast<double>(twopart_encode(p, eps).bit_count);
    }
    double red = (bits / samples - h.mean) / n;
    auto bound = universal_upper_bound({static_cast<double>(n), static_cast<double>(k), eps});
    CHECK(bound.region == Region::SmallK);
    CHECK(red <= 2 * bound.value);
}
