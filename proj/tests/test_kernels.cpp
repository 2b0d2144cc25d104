#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "patternzip/rng.hpp"
#include "patternzip/simd/kernels.hpp"

using namespace patternzip;
using namespace patternzip::simd;

namespace {

bool same_bits(double a, double b)
{
    return std::memcmp(&a, &b, sizeof a) == 0;
}

}  // namespace

TEST_CASE("dispatch")
{
    const KernelTable& k = kernels();
    CHECK(k.name != nullptr);
    if (avx2_kernels() == nullptr)
        MESSAGE("AVX2 unavailable; only the scalar table is exercised");
}

TEST_CASE("mixture step: scalar and AVX2 agree bit for bit")
{
    const KernelTable* fast = avx2_kernels();
    if (!fast)
        return;
    const KernelTable& ref = scalar_kernels();
    CounterRng rng(71);
    for (int rep = 0; rep < 2000; ++rep) {
        std::size_t count = rng.below(300);
        std::vector<double> w(count);
        for (auto& x : w)
            x = rng.below(10) == 0 ? 1e-299 * rng.uniform() : rng.uniform();
        auto w2 = w;
        double num_base = rng.uniform() * 10;
        double num_slope = rng.below(2) ? 0.5 : 0.0;
        double den_base = 1 + rng.uniform() * 1000;
        double scale = 0.5 + rng.uniform();
        double next = rng.uniform() * 5;
        auto a = ref.mixture_step(w.data(), count, num_base, num_slope, den_base, scale, next);
        auto b = fast->mixture_step(w2.data(), count, num_base, num_slope, den_base, scale, next);
        REQUIRE(same_bits(a.weight, b.weight));
        REQUIRE(same_bits(a.inv_den, b.inv_den));
        REQUIRE(same_bits(a.new_mass, b.new_mass));
        for (std::size_t t = 0; t < count; ++t) {
            REQUIRE(same_bits(w[t], w2[t]));
            REQUIRE((w[t] == 0 || w[t] >= kWeightFloor));
        }
    }
}

TEST_CASE("rowsum update: scalar and AVX2 agree bit for bit")
{
    const KernelTable* fast = avx2_kernels();
    if (!fast)
        return;
    const KernelTable& ref = scalar_kernels();
    CounterRng rng(72);
    for (int rep = 0; rep < 2000; ++rep) {
        std::size_t rows = 1 + rng.below(40);
        std::vector<double> col(rows), h1(rows), l1(rows, 0.0);
        for (std::size_t j = 0; j < rows; ++j) {
            col[j] = rng.uniform();
            h1[j] = rng.uniform();
        }
        auto h2 = h1;
        auto l2 = l1;
        // Several updates so the low words are populated.
        for (int step = 0; step < 4; ++step) {
            double sign = rng.below(2) ? 1.0 : -1.0;
            for (auto& x : col)
                x = rng.uniform() * std::exp2(-static_cast<double>(rng.below(60)));
            auto p1 = ref.rowsum_update(h1.data(), l1.data(), col.data(), sign, rows);
            auto p2 = fast->rowsum_update(h2.data(), l2.data(), col.data(), sign, rows);
            REQUIRE(same_bits(p1.hi, p2.hi));
            REQUIRE(same_bits(p1.lo, p2.lo));
            for (std::size_t j = 0; j < rows; ++j) {
                REQUIRE(same_bits(h1[j], h2[j]));
                REQUIRE(same_bits(l1[j], l2[j]));
            }
        }
    }
}

TEST_CASE("double-double rowsums track the exact sum")
{
    // 1 + 2^-60 - 1 vanishes in double but survives in double-double.
    const KernelTable& k = kernels();
    double hi = 1, lo = 0;
    double tiny = std::exp2(-60);
    k.rowsum_update(&hi, &lo, &tiny, 1.0, 1);
    double one = 1;
    auto p = k.rowsum_update(&hi, &lo, &one, -1.0, 1);
    CHECK(p.hi == tiny);
    CHECK(p.lo == 0);
}

TEST_CASE("u64 accumulate: scalar and AVX2 agree")
{
    const KernelTable& ref = scalar_kernels();
    CounterRng rng(73);
    for (int rep = 0; rep < 500; ++rep) {
        std::size_t count = rng.below(100);
        std::vector<std::uint64_t> src(count), d1(count);
        for (std::size_t t = 0; t < count; ++t) {
            src[t] = rng();
            d1[t] = rng();
        }
        auto d2 = d1;
        auto expect = d1;
        for (std::size_t t = 0; t < count; ++t)
            expect[t] += src[t];
        ref.accumulate_u64(d1.data(), src.data(), count);
        REQUIRE(d1 == expect);
        if (const KernelTable* fast = avx2_kernels()) {
            fast->accumulate_u64(d2.data(), src.data(), count);
            REQUIRE(d2 == expect);
        }
    }
}
