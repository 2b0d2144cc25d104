#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "patternzip/bounds.hpp"
#include "patternzip/lab.hpp"
#include "patternzip/seq_models.hpp"

using namespace patternzip;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string csv_of(const SweepResult& r)
{
    std::ostringstream out;
    write_sweep_csv(r.rows, out);
    return out.str();
}

}  // namespace

TEST_CASE("sources")
{
    SourceSpec one;
    one.k = 1;
    for (auto x : sample_sequence(one, 100, 3))
        CHECK(x == 0);

    SourceSpec spec;
    spec.k = 12;
    CHECK(sample_sequence(spec, 500, 9) == sample_sequence(spec, 500, 9));
    CHECK(sample_sequence(spec, 500, 9) != sample_sequence(spec, 500, 10));

    spec.prior = SourceSpec::Prior::Zipf;
    spec.zipf_s = 1.2;
    auto z = sample_theta(spec);
    CHECK(z == zipf_params(12, 1.2));

    spec.prior = SourceSpec::Prior::Fixed;
    spec.theta = {0.25, 0.75};
    spec.k = 2;
    CHECK(sample_theta(spec) == spec.theta);

    CounterRng rng(61);
    auto g = grid_point_theta(10000, 0.2, 5, rng);
    CHECK(std::abs(std::accumulate(g.begin(), g.end(), 0.0) - 1) <= 1e-12);
    double big_n = std::pow(10000.0, 0.8);
    for (std::size_t i = 0; i + 1 < 5; ++i) {
        double b = std::sqrt(g[i] * big_n);
        CHECK(std::abs(b - std::round(b)) <= 1e-9);
    }
}

TEST_CASE("empirical frequencies concentrate")
{
    CounterRng rng(62);
    int inside = 0;
    int total = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        ParamVector theta = sample_simplex(6, rng);
        const std::size_t n = 5000;
        auto counts = sample_counts(theta, n, rng);
        CHECK(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == n);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double f = static_cast<double>(counts[i]) / n;
            inside += std::abs(f - theta[i]) <= 4 * std::sqrt(theta[i] / n);
            ++total;
        }
    }
    CHECK(inside >= 0.99 * total);

    SourceSpec spec;
    spec.k = 4;
    spec.prior = SourceSpec::Prior::Fixed;
    spec.theta = {0.1, 0.2, 0.3, 0.4};
    int ok = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto x = sample_sequence(spec, 4000, s);
        std::vector<double> c(4, 0);
        for (auto v : x)
            c[v] += 1;
        bool all = true;
        for (std::size_t i = 0; i < 4; ++i)
            all &= std::abs(c[i] / 4000 - spec.theta[i]) <= 4 * std::sqrt(spec.theta[i] / 4000);
        ok += all;
    }
    CHECK(ok >= 198);
}

TEST_CASE("worst-case family")
{
    CHECK(extract_pattern(worst_case_sequence(5, 3)) == Pattern{1, 2, 3, 1, 2});
    auto id = extract_pattern(worst_case_sequence(7, 7));
    CHECK(id == Pattern{1, 2, 3, 4, 5, 6, 7});
    CHECK(neg_log2_pml(id) == doctest::Approx(7 * std::log2(7.0)));
    CHECK(distinct_count(extract_pattern(worst_case_sequence(1000, 37))) == 37);
}

TEST_CASE("sweep rows")
{
    SweepConfig cfg;
    cfg.n = 400;
    cfg.ks = {2, 5, 20};
    cfg.schemes = {Scheme::KnownK, Scheme::Mixture, Scheme::UnknownK, Scheme::TwoPart, Scheme::TypeCode};
    cfg.trials = 3;
    cfg.seed = 17;
    cfg.check_coder = true;
    auto r = run_sweep(cfg);
    CHECK(r.rows.size() + r.skipped.size() == 3 * 3 * 5);
    CHECK(r.rows.size() >= 3 * 3 * 4);
    for (const auto& row : r.rows) {
        CHECK(row.neg_log_pml >= 0);
        CHECK(row.modified_redundancy == doctest::Approx((row.bits - row.neg_log_pml) / row.n).epsilon(1e-9));
        CHECK(std::abs(row.modified_redundancy - (row.bits - row.neg_log_pml) / static_cast<double>(row.n)) <= 1e-9);
        if (row.scheme == "known-k" || row.scheme == "unknown-k" || row.scheme == "mixture")
            CHECK(row.bits - row.neg_log_pml <= row.bound_value + 1);
    }

    cfg.threads = 1;
    std::string a = csv_of(run_sweep(cfg));
    cfg.threads = 3;
    std::string b = csv_of(run_sweep(cfg));
    CHECK(a == b);
    CHECK(a.rfind("scheme,n,k,eps,seed,bits,neg_log_pml,modified_redundancy,bound_value\n", 0) == 0);
}

TEST_CASE("worst-case sweep at moderate n")
{
    SweepConfig cfg;
    cfg.n = 100000;
    cfg.eps = 0.1;
    cfg.worst_case = true;
    cfg.ks = {100, 200, 300};
    cfg.schemes = {Scheme::KnownK, Scheme::UnknownK};
    auto r = run_sweep(cfg);
    REQUIRE(r.rows.size() == 6);
    for (const auto& row : r.rows)
        CHECK(row.bits - row.neg_log_pml <= row.bound_value + 1);
    // Above e^(19/18) n^(1/3) ~ 133 the known-k redundancy is negative.
    for (const auto& row : r.rows)
        if (row.scheme == "known-k" && row.k >= 200)
            CHECK(row.modified_redundancy < 0);
}

TEST_CASE("distinguishability")
{
    auto one = distinguishability_experiment(1000, 1, 0.2, 100, 1);
    CHECK(one.p_a == 0);
    CHECK(one.p_psi_a == 0);
    auto r = distinguishability_experiment(100000, 5, 0.3, 2000, 2);
    double sigma = std::sqrt(std::max(r.p_a * (1 - r.p_a), 1e-4) / 2000);
    CHECK(r.p_psi_a <= r.p_a + 3 * sigma);
    CHECK(r.p_a < 0.05);
}

TEST_CASE("entropy gap")
{
    auto r = entropy_gap_experiment(20, 216, 100, 5);
    CHECK(r.iid_bits == doctest::Approx(216 * std::log2(20.0)));
    CHECK(r.known_k_bits < r.iid_bits);
    CHECK(r.pattern_entropy <= r.iid_bits + 3 * r.pattern_entropy_se);
    auto one = entropy_gap_experiment(1, 50, 10, 5);
    CHECK(one.iid_bits == 0);
    CHECK(one.pattern_entropy == 0);
    CHECK(one.known_k_bits == doctest::Approx(0.0));
}

TEST_CASE("plot script")
{
    std::vector<SweepRow> rows;
    auto ks = log_spaced(2, 1000000, 40);
    CHECK(ks.size() == 40);
    CHECK(ks.front() == 2);
    CHECK(ks.back() == 1000000);
    for (std::size_t i = 1; i < ks.size(); ++i)
        CHECK(ks[i] > ks[i - 1]);
    for (const char* s : {"known-k", "unknown-k"})
        for (auto k : ks)
            rows.push_back({s, 1000000, k, 0.1, 1, 1.0 * k, 0.5 * k, 0.1, 2.0 * k});
    auto dir = std::filesystem::temp_directory_path() / "patternzip_plot_test";
    std::filesystem::create_directories(dir);
    std::string prefix = (dir / "curve").string();
    emit_plot_script(rows, prefix);
    std::string csv = slurp(prefix + ".csv");
    std::string gp = slurp(prefix + ".gp");
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 81);
    CHECK(gp.find("curve.csv") != std::string::npos);
    emit_plot_script(rows, prefix);
    CHECK(slurp(prefix + ".csv") == csv);
    CHECK(slurp(prefix + ".gp") == gp);
    CHECK_THROWS_AS(emit_plot_script({}, prefix), Error);
    std::filesystem::remove_all(dir);
}
