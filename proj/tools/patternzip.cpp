#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "patternzip/bounds.hpp"
#include "patternzip/container.hpp"
#include "patternzip/exact_pattern.hpp"
#include "patternzip/lab.hpp"
#include "patternzip/rng.hpp"
#include "patternzip/seq_models.hpp"
#include "verify.hpp"

using namespace patternzip;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const void* data, std::size_t size)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path);
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!f)
        throw Error("write failed: " + path);
}

struct CompressArgs {
    std::string in, out, model = "unknown-k", eps = "0.1", tokens = "bytes";
    std::size_t mixture_cap = PatternMixtureModel::kDefaultCap;
};

int cmd_compress(const CompressArgs& a)
{
    CompressOptions opt;
    opt.model = parse_model_id(a.model);
    opt.eps_fixed = parse_eps_fixed(a.eps);
    opt.mixture_cap = a.mixture_cap;
    opt.tokens = a.tokens == "words" ? TokenMode::Words : TokenMode::Bytes;
    std::string data = read_file(a.in);
    auto res = compress(data, opt);
    write_file(a.out, res.bytes.data(), res.bytes.size());
    std::printf("model=%s n=%zu k=%zu header_bits=%zu payload_bits=%zu neg_log_pml=%.6f modified_redundancy=%.9f "
                "output_bytes=%zu\n",
                model_name(opt.model).c_str(), res.report.n, res.report.k, res.header_bits, res.payload_bits,
                res.report.neg_log_pml, res.report.modified_redundancy, res.bytes.size());
    return 0;
}

int cmd_decompress(const std::string& in, const std::string& out)
{
    std::string data = read_file(in);
    std::string text = decompress({reinterpret_cast<const std::uint8_t*>(data.data()), data.size()});
    write_file(out, text.data(), text.size());
    return 0;
}

struct SweepArgs {
    std::size_t n = 1000000;
    std::string eps = "0.1";
    std::vector<std::size_t> ks;
    std::size_t k_lo = 2, k_hi = 1000, k_count = 40;
    std::vector<std::string> schemes{"known-k", "unknown-k"};
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    bool worst_case = false;
    std::string prior = "uniform";
    double zipf_s = 1.0;
    bool check_coder = false;
    std::size_t threads = 0;
    std::string out;
};

int cmd_sweep(const SweepArgs& a)
{
    SweepConfig cfg;
    cfg.n = a.n;
    cfg.eps = fixed_to_eps(parse_eps_fixed(a.eps));
    cfg.ks = a.ks.empty() ? log_spaced(a.k_lo, std::min(a.k_hi, a.n), a.k_count) : a.ks;
    for (const auto& s : a.schemes)
        cfg.schemes.push_back(parse_scheme(s));
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.worst_case = a.worst_case;
    if (a.prior == "zipf")
        cfg.prior = SourceSpec::Prior::Zipf;
    else if (a.prior != "uniform")
        throw Error("prior must be uniform or zipf");
    cfg.zipf_s = a.zipf_s;
    cfg.check_coder = a.check_coder;
    cfg.threads = a.threads;
    auto res = run_sweep(cfg);
    for (const auto& s : res.skipped)
        std::cerr << s << "\n";
    if (a.out.empty()) {
        write_sweep_csv(res.rows, std::cout);
    } else {
        emit_plot_script(res.rows, a.out);
        std::cerr << "wrote " << a.out << ".csv and " << a.out << ".gp\n";
    }
    return 0;
}

int cmd_bounds(double n, double k, const std::string& eps_text, bool csv)
{
    double eps = std::stod(eps_text);
    if (!(eps > 0 && eps < 1))
        throw Error("eps must lie in (0, 1)");
    BoundConfig cfg{n, k, eps};
    struct Line {
        std::string name, region;
        double per_symbol;
    };
    std::vector<Line> lines;
    auto add_report = [&](const char* name, BoundReport r) { lines.push_back({name, region_name(r.region), r.value}); };
    add_report("minimax_lower", minimax_lower_bound(cfg));
    add_report("most_sources_lower", most_sources_lower_bound(cfg));
    add_report("upper_two_part", universal_upper_bound(cfg));
    lines.push_back({"known_k", "-", known_k_bound(n, k) / n});
    lines.push_back({"known_k_frequent", "-", known_k_bound_frequent(n, k) / n});
    lines.push_back({"mixture", "-", mixture_bound(n, k) / n});
    lines.push_back({"unknown_k", "-", unknown_k_bound(n, k, eps) / n});
    if (csv) {
        std::cout << "n,k,eps,bound_name,region,value\n";
        for (const auto& l : lines)
            std::printf("%.0f,%.0f,%s,%s,%s,%.12g\n", n, k, eps_text.c_str(), l.name.c_str(), l.region.c_str(),
                        l.per_symbol);
    } else {
        std::printf("n=%.0f k=%.0f eps=%s\n%-20s %-8s %16s %16s\n", n, k, eps_text.c_str(), "bound", "region",
                    "bits/symbol", "total bits");
        for (const auto& l : lines)
            std::printf("%-20s %-8s %16.9g %16.6f\n", l.name.c_str(), l.region.c_str(), l.per_symbol, l.per_symbol * n);
    }
    return 0;
}

int cmd_entropy(std::size_t k, std::size_t n, const std::string& dist, double zipf_s, std::size_t samples,
                std::uint64_t seed)
{
    ParamVector theta;
    if (dist == "uniform")
        theta = uniform_params(k);
    else if (dist == "zipf")
        theta = zipf_params(k, zipf_s);
    else
        throw Error("dist must be uniform or zipf");
    double h = 0;
    for (double t : theta)
        if (t > 0)
            h -= t * std::log2(t);
    McEstimate mc = pattern_entropy_mc(theta, n, samples, seed);
    AliasSampler sampler(theta);
    auto model = pattern_known_k_model(k);
    double total = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        CounterRng rng(seed, 0x4B4Bu, s);
        total += assign_log_prob(*model, extract_pattern(sample_letters(sampler, n, rng)));
    }
    std::printf("k=%zu n=%zu dist=%s samples=%zu\n", k, n, dist.c_str(), samples);
    std::printf("iid entropy          %.6f bits\n", static_cast<double>(n) * h);
    std::printf("pattern entropy (MC) %.6f bits +- %.6f\n", mc.mean, mc.std_error);
    std::printf("known-k code length  %.6f bits (average)\n", total / static_cast<double>(samples));
    auto eb = entropy_upper_bound(static_cast<double>(n), static_cast<double>(k), 0.0, h);
    std::printf("entropy bound        %.6f bits/symbol (%s, threshold k' = %.3f)\n", eb.value,
                eb.reduced ? "reduced" : "i.i.d. entropy", eb.threshold);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"patternzip: pattern compression and redundancy experiments"};
    app.require_subcommand(1);

    CompressArgs ca;
    auto* c = app.add_subcommand("compress", "Compress a file");
    c->add_option("input", ca.in, "Input file")->required();
    c->add_option("output", ca.out, "Output container")->required();
    c->add_option("--model", ca.model, "known-k, mixture, unknown-k or two-part")->capture_default_str();
    c->add_option("--eps", ca.eps, "Decimal eps in (0, 1) for unknown-k and two-part")->capture_default_str();
    c->add_option("--tokens", ca.tokens, "bytes or words")->check(CLI::IsMember({"bytes", "words"}))->capture_default_str();
    c->add_option("--mixture-cap", ca.mixture_cap, "Largest mixture component")->capture_default_str();

    std::string d_in, d_out;
    auto* d = app.add_subcommand("decompress", "Decompress a container");
    d->add_option("input", d_in, "Input container")->required();
    d->add_option("output", d_out, "Output file")->required();

    SweepArgs sa;
    auto* s = app.add_subcommand("sweep", "Redundancy sweep over k; CSV to stdout or --out");
    s->add_option("--n", sa.n, "Sequence length")->capture_default_str();
    s->add_option("--eps", sa.eps, "Decimal eps in (0, 1)")->capture_default_str();
    s->add_option("--k", sa.ks, "Explicit k values (overrides the log-spaced range)");
    s->add_option("--k-min", sa.k_lo, "Smallest k of the log-spaced range")->capture_default_str();
    s->add_option("--k-max", sa.k_hi, "Largest k of the log-spaced range")->capture_default_str();
    s->add_option("--k-count", sa.k_count, "Number of log-spaced k values")->capture_default_str();
    s->add_flag("--full", [&](std::int64_t) { sa.k_count = 1000000; }, "Every integer k in the range");
    s->add_option("--schemes", sa.schemes, "known-k, mixture, unknown-k, two-part, type-code")
        ->delimiter(',')
        ->capture_default_str();
    s->add_option("--trials", sa.trials, "Random sources per k")->capture_default_str();
    s->add_option("--seed", sa.seed, "Master seed")->capture_default_str();
    s->add_flag("--worst-case", sa.worst_case, "All k letters first, then round robin");
    s->add_option("--prior", sa.prior, "uniform (flat Dirichlet) or zipf")->capture_default_str();
    s->add_option("--zipf-s", sa.zipf_s, "Zipf exponent")->capture_default_str();
    s->add_flag("--check-coder", sa.check_coder, "Also run the arithmetic coder on every row");
    s->add_option("--threads", sa.threads, "Worker threads (0: automatic)")->capture_default_str();
    s->add_option("--out", sa.out, "Write <out>.csv and a gnuplot script <out>.gp");

    double b_n = 0, b_k = 0;
    std::string b_eps = "0.1";
    bool b_csv = false;
    auto* b = app.add_subcommand("bounds", "Evaluate the redundancy bounds");
    b->add_option("--n", b_n, "Sequence length")->required();
    b->add_option("--k", b_k, "Alphabet size")->required();
    b->add_option("--eps", b_eps, "Decimal eps in (0, 1)")->capture_default_str();
    b->add_flag("--csv", b_csv, "CSV output");

    std::size_t e_k = 20, e_n = 216, e_samples = 500;
    std::uint64_t e_seed = 1;
    std::string e_dist = "uniform";
    double e_zipf = 1.0;
    auto* e = app.add_subcommand("entropy", "Pattern entropy against i.i.d. entropy");
    e->add_option("--k", e_k, "Alphabet size (<= 25)")->capture_default_str();
    e->add_option("--n", e_n, "Sequence length")->capture_default_str();
    e->add_option("--dist", e_dist, "uniform or zipf")->capture_default_str();
    e->add_option("--zipf-s", e_zipf, "Zipf exponent")->capture_default_str();
    e->add_option("--samples", e_samples, "Monte Carlo samples")->capture_default_str();
    e->add_option("--seed", e_seed, "Seed")->capture_default_str();

    auto* v = app.add_subcommand("verify", "Run the exhaustive small-n checks");

    CLI11_PARSE(app, argc, argv);
    try {
        if (c->parsed())
            return cmd_compress(ca);
        if (d->parsed())
            return cmd_decompress(d_in, d_out);
        if (s->parsed())
            return cmd_sweep(sa);
        if (b->parsed())
            return cmd_bounds(b_n, b_k, b_eps, b_csv);
        if (e->parsed())
            return cmd_entropy(e_k, e_n, e_dist, e_zipf, e_samples, e_seed);
        if (v->parsed())
            return run_verify(std::cout) ? 1 : 0;
    } catch (const std::exception& ex) {
        std::cerr << "patternzip: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
