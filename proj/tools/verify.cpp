#include "verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "patternzip/bitio.hpp"
#include "patternzip/container.hpp"
#include "patternzip/exact_pattern.hpp"
#include "patternzip/partitions.hpp"
#include "patternzip/range_coder.hpp"
#include "patternzip/rng.hpp"
#include "patternzip/seq_models.hpp"
#include "patternzip/simd/kernels.hpp"
#include "patternzip/twopart.hpp"

using namespace patternzip;

namespace {

bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

bool check_exact_probability()
{
    CounterRng rng(7);
    for (std::size_t dim = 1; dim <= 4; ++dim)
        for (int rep = 0; rep < 5; ++rep) {
            ParamVector theta = sample_simplex(dim, rng);
            for (std::size_t n = 1; n <= 6; ++n) {
                double total = 0;
                for (const auto& p : enumerate_patterns(n, dim)) {
                    double a = pattern_prob(theta, p);
                    if (!close_rel(a, pattern_prob_bruteforce(theta, p), 1e-10))
                        return false;
                    total += a;
                }
                if (std::abs(total - 1) > 1e-9)
                    return false;
            }
        }
    return true;
}

bool check_prefix_conditionals()
{
    CounterRng rng(8);
    ParamVector theta = sample_simplex(4, rng);
    for (const auto& p : enumerate_patterns(7, 4)) {
        double prod = 1;
        for (double c : prefix_conditionals(theta, p))
            prod *= c;
        if (!close_rel(prod, pattern_prob(theta, p), 1e-10))
            return false;
    }
    return true;
}

bool check_sequential_roundtrip()
{
    for (std::size_t n = 1; n <= 7; ++n)
        for (const auto& p : enumerate_patterns(n, n)) {
            std::size_t k = distinct_count(p);
            std::unique_ptr<SequentialModel> models[] = {pattern_known_k_model(k), pattern_mixture_model(n),
                                                         pattern_unknown_k_model(0.1)};
            for (auto& m : models) {
                BitStream bits = arith_encode(*m, p);
                double ideal = assign_log_prob(*m, p);
                if (static_cast<double>(bits.bit_count) > std::ceil(ideal - 1e-9) + 2)
                    return false;
                if (arith_decode(*m, bits, n) != p)
                    return false;
            }
            if (twopart_decode(twopart_encode(p, 0.1), n, 0.1) != p)
                return false;
        }
    return true;
}

bool check_container()
{
    const char* inputs[] = {"lossless", "aaaa", "abracadabra", "the cat and the hat"};
    for (const char* s : inputs)
        for (ModelId id : {ModelId::KnownK, ModelId::Mixture, ModelId::UnknownK, ModelId::TwoPart})
            for (TokenMode mode : {TokenMode::Bytes, TokenMode::Words}) {
                CompressOptions opt;
                opt.model = id;
                opt.tokens = mode;
                auto res = compress(s, opt);
                if (decompress(res.bytes) != s)
                    return false;
            }
    return true;
}

bool check_elias()
{
    for (std::uint64_t m = 1; m <= 20000; ++m) {
        BitStream s = elias_delta_encode(m);
        if (s.bit_count != elias_delta_length(m) || elias_delta_decode(s) != m)
            return false;
    }
    return true;
}

bool check_partitions()
{
    for (std::size_t n = 1; n <= 20; ++n) {
        BigInt count = partition_count(n);
        for (BigInt r = 0; r < count; ++r)
            if (partition_rank(partition_unrank(n, r)) != r)
                return false;
    }
    return partition_count(100) == BigInt(190569292);
}

bool check_type_code()
{
    for (std::size_t n = 1; n <= 7; ++n)
        for (const auto& p : enumerate_patterns(n, n))
            if (type_code_decode(type_code_encode(p), n) != p)
                return false;
    return true;
}

bool check_kernels()
{
    const auto* fast = simd::avx2_kernels();
    if (!fast)
        return true;
    const auto& ref = simd::scalar_kernels();
    CounterRng rng(9);
    for (std::size_t len : {1u, 3u, 4u, 7u, 64u, 1001u}) {
        std::vector<double> a(len), b;
        for (auto& x : a)
            x = rng.uniform();
        b = a;
        auto s1 = ref.mixture_step(a.data(), len, 3.5, 1.0, 10.0, 0.9, 2.0);
        auto s2 = fast->mixture_step(b.data(), len, 3.5, 1.0, 10.0, 0.9, 2.0);
        if (a != b || s1.weight != s2.weight || s1.inv_den != s2.inv_den || s1.new_mass != s2.new_mass)
            return false;
        std::vector<double> col(len), h1(len, 0.5), l1(len, 0.0);
        for (auto& x : col)
            x = rng.uniform();
        auto h2 = h1;
        auto l2 = l1;
        auto p1 = ref.rowsum_update(h1.data(), l1.data(), col.data(), -1.0, len);
        auto p2 = fast->rowsum_update(h2.data(), l2.data(), col.data(), -1.0, len);
        if (p1.hi != p2.hi || p1.lo != p2.lo || h1 != h2 || l1 != l2)
            return false;
        std::vector<std::uint64_t> d1(len, 3), d2(len, 3), src(len);
        for (auto& x : src)
            x = rng();
        ref.accumulate_u64(d1.data(), src.data(), len);
        fast->accumulate_u64(d2.data(), src.data(), len);
        if (d1 != d2)
            return false;
    }
    return true;
}

}  // namespace

int run_verify(std::ostream& out)
{
    struct Check {
        const char* name;
        std::function<bool()> fn;
    };
    const Check checks[] = {
        {"pattern probability vs brute force, normalization (n <= 6, dim <= 4)", check_exact_probability},
        {"prefix conditionals telescope (n = 7)", check_prefix_conditionals},
        {"sequential coders round trip, overhead <= 2 bits (n <= 7)", check_sequential_roundtrip},
        {"container round trip", check_container},
        {"Elias delta bijection and lengths (m <= 20000)", check_elias},
        {"partition rank/unrank (n <= 20), p(100)", check_partitions},
        {"type code round trip (n <= 7)", check_type_code},
        {"SIMD kernels match scalar", check_kernels},
    };
    int failures = 0;
    for (const auto& c : checks) {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        std::string what;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            what = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << (ok ? "PASS " : "FAIL ") << c.name << " (" << secs << " s)";
        if (!what.empty())
            out << ": " << what;
        out << "\n";
        failures += !ok;
    }
    out << (failures ? "verify: FAILED\n" : "verify: all checks passed\n");
    return failures;
}
