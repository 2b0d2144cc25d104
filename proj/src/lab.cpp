#include "patternzip/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "patternzip/bounds.hpp"
#include "patternzip/exact_pattern.hpp"
#include "patternzip/partitions.hpp"
#include "patternzip/range_coder.hpp"
#include "patternzip/seq_models.hpp"
#include "patternzip/twopart.hpp"

namespace patternzip {

ParamVector grid_point_theta(std::size_t n, double eps, std::size_t k, CounterRng& rng)
{
    if (k == 0)
        throw Error("k must be positive");
    if (k == 1)
        return {1.0};
    double big_n = std::pow(static_cast<double>(n), 1 - eps);
    auto top = static_cast<std::uint64_t>(std::floor(std::sqrt(big_n / static_cast<double>(k))));
    if (top < 1)
        throw Error("grid too coarse for this k");
    std::vector<std::uint64_t> b(k - 1);
    for (auto& x : b)
        x = 1 + rng.below(top);
    std::sort(b.begin(), b.end());
    ParamVector theta(k);
    double sum = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        theta[i] = static_cast<double>(b[i] * b[i]) / big_n;
        sum += theta[i];
    }
    theta[k - 1] = 1 - sum;
    return theta;
}

ParamVector sample_theta(const SourceSpec& spec)
{
    if (spec.k == 0)
        throw Error("k must be positive");
    switch (spec.prior) {
    case SourceSpec::Prior::UniformSimplex: {
        CounterRng rng(spec.seed, 0x7468u, spec.k);
        return sample_simplex(spec.k, rng);
    }
    case SourceSpec::Prior::Zipf: return zipf_params(spec.k, spec.zipf_s);
    case SourceSpec::Prior::Fixed: check_param_vector(spec.theta); return spec.theta;
    case SourceSpec::Prior::GridPoint: {
        CounterRng rng(spec.seed, 0x4752u, spec.k);
        return grid_point_theta(spec.grid_n, spec.grid_eps, spec.k, rng);
    }
    }
    throw Error("unknown prior");
}

std::vector<std::uint32_t> sample_sequence(const SourceSpec& spec, std::size_t n, std::uint64_t seed)
{
    AliasSampler sampler(sample_theta(spec));
    CounterRng rng(seed, 0x7365u, n);
    return sample_letters(sampler, n, rng);
}

std::vector<std::uint32_t> worst_case_sequence(std::size_t n, std::size_t k)
{
    if (k == 0 || k > n)
        throw Error("worst-case sequence needs 1 <= k <= n");
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<std::uint32_t>(i % k);
    return out;
}

std::vector<std::uint64_t> sample_counts(const ParamVector& theta, std::size_t n, CounterRng& rng)
{
    std::vector<std::uint64_t> counts(theta.size(), 0);
    std::uint64_t left = n;
    double mass = 1.0;
    for (std::size_t i = 0; i < theta.size() && left > 0; ++i) {
        if (i + 1 == theta.size()) {
            counts[i] = left;
            break;
        }
        double p = mass > 0 ? std::clamp(theta[i] / mass, 0.0, 1.0) : 1.0;
        std::binomial_distribution<std::uint64_t> bin(left, p);
        counts[i] = bin(rng);
        left -= counts[i];
        mass -= theta[i];
    }
    return counts;
}

std::string scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::KnownK: return "known-k";
    case Scheme::Mixture: return "mixture";
    case Scheme::UnknownK: return "unknown-k";
    case Scheme::TwoPart: return "two-part";
    case Scheme::TypeCode: return "type-code";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name)
{
    for (Scheme s : {Scheme::KnownK, Scheme::Mixture, Scheme::UnknownK, Scheme::TwoPart, Scheme::TypeCode})
        if (scheme_name(s) == name)
            return s;
    throw Error("unknown scheme '" + name + "' (known-k, mixture, unknown-k, two-part, type-code)");
}

std::size_t worker_threads(std::size_t requested)
{
    std::size_t hw = std::max<unsigned>(1, std::thread::hardware_concurrency());
    std::size_t n = requested ? requested : hw;
    if (const char* env = std::getenv("PATTERNZIP_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap > 0)
            n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(n, 1);
}

namespace {

struct Cell {
    std::size_t k;
    std::size_t trial;
};

struct CellResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> skipped;
};

double arithmetic_bits(const SequentialModel& model, const Pattern& p, bool check)
{
    double ideal = assign_log_prob(model, p);
    if (check) {
        BitWriter w;
        std::size_t len = arith_encode_into(model, p, w);
        if (static_cast<double>(len) > std::ceil(ideal - 1e-9) + 2)
            throw Error("coder overhead above 2 bits");
        BitStream bits = w.finish();
        if (arith_decode(model, bits, p.size()) != p)
            throw Error("coder round trip failed");
    }
    return ideal;
}

CellResult run_cell(const SweepConfig& cfg, const Cell& cell)
{
    CellResult out;
    std::uint64_t seed = cfg.worst_case ? cfg.seed : mix64(cfg.seed ^ mix64(cell.trial + 1));
    std::vector<std::uint32_t> letters;
    if (cfg.worst_case) {
        letters = worst_case_sequence(cfg.n, cell.k);
    } else {
        SourceSpec spec;
        spec.k = cell.k;
        spec.prior = cfg.prior;
        spec.zipf_s = cfg.zipf_s;
        spec.seed = seed;
        letters = sample_sequence(spec, cfg.n, seed);
    }
    Pattern p = extract_pattern(letters);
    const std::size_t n = p.size();
    const std::size_t k = distinct_count(p);
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);

    for (Scheme s : cfg.schemes) {
        SweepRow row;
        row.scheme = scheme_name(s);
        row.n = n;
        row.k = k;
        row.eps = cfg.eps;
        row.seed = seed;
        switch (s) {
        case Scheme::KnownK:
            row.bits = arithmetic_bits(*pattern_known_k_model(k), p, cfg.check_coder);
            row.bound_value = known_k_bound(dn, dk);
            break;
        case Scheme::Mixture:
            row.bits = arithmetic_bits(*pattern_mixture_model(n, cfg.mixture_cap), p, cfg.check_coder);
            row.bound_value = mixture_bound(dn, dk);
            break;
        case Scheme::UnknownK:
            row.bits = arithmetic_bits(*pattern_unknown_k_model(cfg.eps), p, cfg.check_coder);
            row.bound_value = unknown_k_bound(dn, dk, cfg.eps);
            break;
        case Scheme::TwoPart: {
            TwoPartReport rep;
            BitStream bits = twopart_encode(p, cfg.eps, &rep);
            if (cfg.check_coder && twopart_decode(bits, n, cfg.eps) != p)
                throw Error("two-part round trip failed");
            row.bits = static_cast<double>(rep.bits);
            row.bound_value = dn * universal_upper_bound({dn, dk, cfg.eps}).value;
            break;
        }
        case Scheme::TypeCode: {
            if (!type_code_available(p)) {
                out.skipped.push_back("type-code skipped at n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                      ": outside the partition ranking limits");
                continue;
            }
            BitWriter w;
            row.bits = static_cast<double>(type_code_encode_into(p, w));
            row.bound_value = upper_large_k_coefficient() * std::sqrt(dn) + 3;
            break;
        }
        }
        CodeLengthReport r = modified_redundancy(row.bits, p);
        row.neg_log_pml = r.neg_log_pml;
        row.modified_redundancy = r.modified_redundancy;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg)
{
    if (cfg.schemes.empty())
        throw Error("no schemes selected");
    std::vector<Cell> cells;
    for (std::size_t k : cfg.ks) {
        if (k == 0 || k > cfg.n)
            throw Error("every k must lie in [1, n]");
        std::size_t trials = cfg.worst_case ? 1 : cfg.trials;
        for (std::size_t t = 0; t < trials; ++t)
            cells.push_back({k, t});
    }
    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
            try {
                results[i] = run_cell(cfg, cells[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    std::size_t threads = std::min(worker_threads(cfg.threads), std::max<std::size_t>(cells.size(), 1));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    SweepResult res;
    for (auto& r : results) {
        res.rows.insert(res.rows.end(), r.rows.begin(), r.rows.end());
        res.skipped.insert(res.skipped.end(), r.skipped.begin(), r.skipped.end());
    }
    return res;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out)
{
    out << "scheme,n,k,eps,seed,bits,neg_log_pml,modified_redundancy,bound_value\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.6g,%llu,%.12g,%.12g,%.12g,%.12g\n", r.scheme.c_str(), r.n, r.k,
                      r.eps, static_cast<unsigned long long>(r.seed), r.bits, r.neg_log_pml, r.modified_redundancy,
                      r.bound_value);
        out << buf;
    }
}

DistinguishabilityReport distinguishability_experiment(std::size_t n, std::size_t k, double eps, std::size_t trials,
                                                       std::uint64_t seed)
{
    if (n < 2 || k == 0 || trials == 0 || !(eps > 0 && eps < 1))
        throw Error("distinguishability needs n >= 2, k >= 1, trials >= 1, 0 < eps < 1");
    DistinguishabilityReport rep;
    rep.trials = trials;
    CounterRng theta_rng(seed, 0x4752u, k);
    rep.theta = grid_point_theta(n, eps, k, theta_rng);
    rep.mean_abs_delta.assign(k, 0.0);
    if (k == 1)
        return rep;

    const double big_n = std::pow(static_cast<double>(n), 1 - eps);
    std::vector<double> half_width(k);
    for (std::size_t i = 0; i < k; ++i) {
        auto b = static_cast<std::uint64_t>(std::floor(std::sqrt(rep.theta[i] * big_n) + 1e-9));
        while (b > 1 && static_cast<double>(b * b) / big_n > rep.theta[i])
            --b;
        b = std::max<std::uint64_t>(b, 1);
        half_width[i] = (2.0 * static_cast<double>(b) - 1.0) / big_n / 2;
    }
    const double radius = std::pow(static_cast<double>(n), -(1 - eps) / 2);

    std::size_t hit_a = 0, hit_psi = 0, hit_far = 0;
    ParamVector est(k);
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, 0x4449u + k, t);
        auto counts = sample_counts(rep.theta, n, rng);
        for (std::size_t i = 0; i < k; ++i)
            est[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
        bool a = false;
        double dist2 = 0;
        for (std::size_t i = 0; i < k; ++i) {
            double d = est[i] - rep.theta[i];
            rep.mean_abs_delta[i] += std::abs(d);
            a = a || std::abs(d) >= half_width[i];
            dist2 += d * d;
        }
        ParamVector psi = est;
        std::sort(psi.begin(), psi.end());
        bool pa = false;
        for (std::size_t i = 0; i < k; ++i)
            pa = pa || std::abs(psi[i] - rep.theta[i]) >= half_width[i];
        hit_a += a;
        hit_psi += pa;
        hit_far += std::sqrt(dist2) > radius;
    }
    double tr = static_cast<double>(trials);
    rep.p_a = static_cast<double>(hit_a) / tr;
    rep.p_psi_a = static_cast<double>(hit_psi) / tr;
    rep.p_far = static_cast<double>(hit_far) / tr;
    for (auto& d : rep.mean_abs_delta)
        d /= tr;
    return rep;
}

EntropyGapReport entropy_gap_experiment(std::size_t k, std::size_t n, std::size_t samples, std::uint64_t seed)
{
    if (k == 0 || k > kExactDimLimit || n == 0 || samples == 0)
        throw Error("entropy gap needs 1 <= k <= 25, n >= 1, samples >= 1");
    EntropyGapReport rep;
    rep.k = k;
    rep.n = n;
    rep.samples = samples;
    ParamVector theta = uniform_params(k);
    rep.iid_bits = static_cast<double>(n) * std::log2(static_cast<double>(k));
    McEstimate mc = pattern_entropy_mc(theta, n, samples, seed);
    rep.pattern_entropy = mc.mean;
    rep.pattern_entropy_se = mc.std_error;
    AliasSampler sampler(theta);
    auto model = pattern_known_k_model(k);
    double total = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        CounterRng rng(seed, 0x4B4Bu, s);
        Pattern p = extract_pattern(sample_letters(sampler, n, rng));
        total += assign_log_prob(*model, p);
    }
    rep.known_k_bits = total / static_cast<double>(samples);
    return rep;
}

void emit_plot_script(const std::vector<SweepRow>& rows, const std::string& prefix)
{
    if (rows.empty())
        throw Error("no rows to plot");
    std::string csv = prefix + ".csv";
    std::string gp = prefix + ".gp";
    {
        std::ofstream f(csv, std::ios::binary);
        if (!f)
            throw Error("cannot write " + csv);
        write_sweep_csv(rows, f);
        if (!f)
            throw Error("write failed: " + csv);
    }
    std::vector<std::string> schemes;
    for (const auto& r : rows)
        if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end())
            schemes.push_back(r.scheme);
    std::string base = csv.substr(csv.find_last_of('/') + 1);
    std::ofstream f(gp, std::ios::binary);
    if (!f)
        throw Error("cannot write " + gp);
    f << "# gnuplot " << gp.substr(gp.find_last_of('/') + 1) << "\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 1000,700\n"
      << "set output '" << base.substr(0, base.size() - 4) << ".png'\n"
      << "set logscale x\n"
      << "set xlabel 'k'\n"
      << "set ylabel 'n * modified redundancy [bits]'\n"
      << "set key left top\n"
      << "plot \\\n";
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const auto& s = schemes[i];
        f << "  '" << base << "' every ::1 using 3:(strcol(1) eq '" << s << "' ? $6-$7 : 1/0) with points title '"
          << s << "', \\\n"
          << "  '" << base << "' every ::1 using 3:(strcol(1) eq '" << s << "' ? $9 : 1/0) with lines title '" << s
          << " bound'" << (i + 1 < schemes.size() ? ", \\\n" : "\n");
    }
    if (!f)
        throw Error("write failed: " + gp);
}

std::vector<std::size_t> log_spaced(std::size_t lo, std::size_t hi, std::size_t count)
{
    if (lo == 0 || hi < lo || count == 0)
        throw Error("log_spaced needs 1 <= lo <= hi and count >= 1");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count; ++i) {
        double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        auto v = static_cast<std::size_t>(std::llround(static_cast<double>(lo) * std::pow(static_cast<double>(hi) / static_cast<double>(lo), t)));
        v = std::clamp(v, lo, hi);
        if (out.empty() || out.back() != v)
            out.push_back(v);
    }
    return out;
}

}  // namespace patternzip
