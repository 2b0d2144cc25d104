#include "patternzip/twopart.hpp"

#include <algorithm>
#include <cmath>

#include "patternzip/exact_pattern.hpp"
#include "patternzip/partitions.hpp"
#include "patternzip/range_coder.hpp"

namespace patternzip {

std::uint64_t GridSpec::floor_index(double x) const
{
    if (!(x > 0))
        return 0;
    auto b = static_cast<std::uint64_t>(std::floor(std::sqrt(x * scale)));
    while (b > 0 && tau(b) > x)
        --b;
    while (b < points && tau(b + 1) <= x)
        ++b;
    return std::min(b, points);
}

GridSpec make_grid(std::size_t n, double eps, GridDirection direction)
{
    if (n < 2)
        throw Error("grid needs n >= 2");
    if (!(eps >= 0 && eps < 1))
        throw Error("eps must lie in [0, 1)");
    GridSpec g;
    g.n = n;
    g.eps = eps;
    g.direction = direction;
    double e = direction == GridDirection::Lower ? 1.0 - eps : 1.0 + eps;
    g.scale = std::pow(static_cast<double>(n), e);
    auto b = static_cast<std::uint64_t>(std::floor(std::sqrt(g.scale)));
    while (b > 0 && g.tau(b) > 1.0)
        --b;
    while (g.tau(b + 1) <= 1.0)
        ++b;
    g.points = b;
    return g;
}

QuantizedParams quantize_ordered(const ParamVector& psi, const GridSpec& g)
{
    const std::size_t k = psi.size();
    if (k == 0)
        throw Error("empty parameter vector");
    if (static_cast<double>(k) * g.tau(1) > 1.0)
        throw Error("grid too coarse for this dimension");
    ParamVector sorted = psi;
    std::sort(sorted.begin(), sorted.end());

    QuantizedParams q;
    q.phi.resize(k);
    q.index.resize(k - 1);

    std::vector<double> target(k, 0.0);
    for (std::size_t i = 0; i + 1 < k; ++i)
        target[i + 1] = target[i] + sorted[i];
    std::vector<double> sum(k, 0.0);
    auto feasible = [&](std::uint64_t b, std::size_t i) {
        // Components i+1..k can still be at least tau_b.
        return 1.0 - (sum[i] + g.tau(b)) >= static_cast<double>(k - 1 - i) * g.tau(b);
    };
    auto candidates = [&](std::size_t i, std::uint64_t prev, std::uint64_t out[2]) {
        std::uint64_t lo = std::max<std::uint64_t>(g.floor_index(sorted[i]), 1);
        std::uint64_t hi = std::min(lo + 1, g.points);
        if (g.tau(lo) > sorted[i])
            hi = lo;
        std::size_t m = 0;
        for (std::uint64_t b : {lo, hi})
            if (b >= prev && feasible(b, i) && (m == 0 || b != out[0]))
                out[m++] = b;
        if (m == 2 && std::abs(sum[i] + g.tau(out[1]) - target[i + 1]) < std::abs(sum[i] + g.tau(out[0]) - target[i + 1]))
            std::swap(out[0], out[1]);
        return m;
    };

    // Greedy choice first. On a dead end (no admissible neighbour, or an
    // implied last component too far from its target) back up to the last
    // component that still has its second choice. Bounded; the first
    // complete assignment, or else a clamped greedy pass, covers the rest.
    std::vector<std::uint64_t> choice(k, 0), alt(k, 0), first;
    std::vector<std::size_t> alts(k, 0);
    auto last_ok = [&] {
        double phi_k = 1.0 - sum[k - 1];
        return std::abs(sorted[k - 1] - phi_k) <= 2.5 * std::sqrt(phi_k) / std::sqrt(g.scale);
    };
    std::size_t budget = 64 * k;
    std::size_t i = 0;
    bool found = k == 1;
    while (!found && budget-- > 0) {
        bool dead = false;
        if (i + 1 == k) {
            if (first.empty())
                first = choice;
            if (last_ok()) {
                found = true;
                break;
            }
            dead = true;
        } else {
            std::uint64_t prev = i == 0 ? 1 : choice[i - 1];
            std::uint64_t c[2] = {0, 0};
            std::size_t m = candidates(i, prev, c);
            if (m > 0) {
                choice[i] = c[0];
                alts[i] = m - 1;
                alt[i] = c[1];
                sum[i + 1] = sum[i] + g.tau(choice[i]);
                ++i;
            } else {
                dead = true;
            }
        }
        if (!dead)
            continue;
        while (i > 0 && alts[i - 1] == 0)
            --i;
        if (i == 0)
            break;
        --i;
        choice[i] = alt[i];
        alts[i] = 0;
        sum[i + 1] = sum[i] + g.tau(choice[i]);
        ++i;
    }
    if (!found && !first.empty()) {
        choice = first;
        found = true;
    }

    if (!found) {
        std::uint64_t prev = 1;
        for (std::size_t j = 0; j + 1 < k; ++j) {
            std::uint64_t c[2] = {0, 0};
            std::size_t m = candidates(j, prev, c);
            std::uint64_t b = 0;
            if (m > 0) {
                b = c[0];
            } else {
                std::uint64_t lo = std::max<std::uint64_t>(g.floor_index(sorted[j]), 1);
                b = std::max(std::min(lo + 1, g.points), prev);
                while (b > prev && !feasible(b, j))
                    --b;
            }
            choice[j] = b;
            sum[j + 1] = sum[j] + g.tau(b);
            prev = b;
        }
    }

    double total = 0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        q.index[j] = choice[j];
        q.phi[j] = g.tau(choice[j]);
        total += q.phi[j];
    }
    q.phi[k - 1] = 1.0 - total;
    return q;
}

std::size_t encode_quantized(const QuantizedParams& q, BitWriter& out)
{
    std::size_t start = out.bit_count();
    std::uint64_t prev = 0;
    for (auto b : q.index) {
        if (b < prev)
            throw Error("grid indices must be non-decreasing");
        elias_delta_encode(out, b - prev + 1);
        prev = b;
    }
    return out.bit_count() - start;
}

QuantizedParams decode_quantized(BitReader& in, const GridSpec& g, std::size_t k)
{
    if (k == 0)
        throw Error("empty parameter vector");
    QuantizedParams q;
    q.index.resize(k - 1);
    q.phi.resize(k);
    std::uint64_t prev = 0;
    double sum = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        std::uint64_t gap = elias_delta_decode(in) - 1;
        if (gap > g.points - prev)
            throw Error("grid index past the last grid point");
        prev += gap;
        if (prev == 0)
            throw Error("grid index zero");
        q.index[i] = prev;
        q.phi[i] = g.tau(prev);
        sum += q.phi[i];
    }
    q.phi[k - 1] = 1.0 - sum;
    if (k > 1 && !(q.phi[k - 1] >= q.phi[k - 2]))
        throw Error("corrupt parameter block");
    return q;
}

// ---------------------------------------------------------------------------

GreedyPermutationModel::GreedyPermutationModel(ParamVector phi) : unassigned_(std::move(phi))
{
    check_param_vector(unassigned_);
    std::erase_if(unassigned_, [](double x) { return !(x > 0); });
    std::sort(unassigned_.begin(), unassigned_.end());
    unassigned_mass_ = 0;
    for (double x : unassigned_)
        unassigned_mass_ += x;
    cum_.push_back(0);
}

std::size_t GreedyPermutationModel::event_count() const
{
    return assigned_.size() + (unassigned_.empty() ? 0 : 1);
}

double GreedyPermutationModel::probability(std::size_t event) const
{
    double total = cum_.back() + unassigned_mass_;
    if (event < assigned_.size())
        return assigned_[event] / total;
    if (event == assigned_.size() && !unassigned_.empty())
        return unassigned_mass_ / total;
    if (event == assigned_.size())
        throw Error("alphabet exhausted");
    throw Error("index skips the next available value");
}

double GreedyPermutationModel::cumulative(std::size_t event) const
{
    double total = cum_.back() + unassigned_mass_;
    if (event >= event_count())
        return 1.0;
    return cum_[event] / total;
}

void GreedyPermutationModel::update(std::size_t event)
{
    probability(event);
    if (event == assigned_.size()) {
        double x = unassigned_.back();
        unassigned_.pop_back();
        unassigned_mass_ = 0;
        for (double u : unassigned_)
            unassigned_mass_ += u;
        assigned_.push_back(x);
        cum_.push_back(cum_.back() + x);
    }
    ++consumed_;
}

std::unique_ptr<SequentialModel> quantized_pattern_model(const ParamVector& phi, std::size_t n)
{
    std::size_t nonzero = 0;
    for (double x : phi)
        nonzero += x > 0;
    if (nonzero <= kPrefixDimLimit) {
        std::size_t states = pattern_state_count(phi);
        if (states <= kCodingStateLimit && static_cast<double>(n) * static_cast<double>(states) <= 4.0e7)
            return std::make_unique<FixedThetaPatternModel>(phi);
    }
    return std::make_unique<GreedyPermutationModel>(phi);
}

ParamVector twopart_estimate(const Pattern& p)
{
    auto counts = occurrence_counts(p);
    if (counts.size() <= kPatternMlEstimateLimit)
        return pattern_ml_estimate_counts(counts).psi;
    ParamVector psi(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        psi[i] = static_cast<double>(counts[i]) / static_cast<double>(p.size());
    std::sort(psi.begin(), psi.end());
    return psi;
}

namespace {

void check_eps(double eps)
{
    if (!(eps > 0 && eps < 1))
        throw Error("eps must lie in (0, 1)");
}

}  // namespace

TwoPartReport twopart_encode_into(const Pattern& p, double eps, BitWriter& out)
{
    check_eps(eps);
    if (!is_valid_pattern(p))
        throw Error("invalid pattern");
    const std::size_t n = p.size();
    const std::size_t k = distinct_count(p);
    TwoPartReport rep;

    BitWriter quant;
    elias_delta_encode(quant, k);
    if (k > 1) {
        auto g = make_grid(n, eps, GridDirection::Upper);
        rep.estimate = twopart_estimate(p);
        rep.quantized = quantize_ordered(rep.estimate, g);
        encode_quantized(rep.quantized, quant);
        auto model = quantized_pattern_model(rep.quantized.phi, n);
        arith_encode_into(*model, p, quant);
    } else {
        rep.estimate = {1.0};
        rep.quantized.phi = {1.0};
    }
    rep.quant_bits = quant.bit_count();

    BitWriter type;
    if (type_code_available(p))
        rep.type_bits = type_code_encode_into(p, type);

    rep.used_type = rep.type_bits > 0 && rep.type_bits < rep.quant_bits;
    out.put_bit(rep.used_type);
    out.append(rep.used_type ? type.finish() : quant.finish());
    rep.bits = 1 + (rep.used_type ? rep.type_bits : rep.quant_bits);
    return rep;
}

BitStream twopart_encode(const Pattern& p, double eps, TwoPartReport* report)
{
    BitWriter w;
    auto rep = twopart_encode_into(p, eps, w);
    if (report)
        *report = std::move(rep);
    return w.finish();
}

Pattern twopart_decode_from(BitReader& in, std::size_t n, double eps)
{
    check_eps(eps);
    if (n == 0)
        throw Error("empty pattern");
    if (in.read_bit())
        return type_code_decode_from(in, n);
    std::uint64_t k = elias_delta_decode(in);
    if (k > n)
        throw Error("corrupt stream");
    if (k == 1)
        return Pattern(n, 1);
    auto g = make_grid(n, eps, GridDirection::Upper);
    auto q = decode_quantized(in, g, k);
    auto model = quantized_pattern_model(q.phi, n);
    Pattern p = arith_decode_from(*model, in, n);
    if (distinct_count(p) != k)
        throw Error("corrupt stream");
    return p;
}

Pattern twopart_decode(const BitStream& bits, std::size_t n, double eps)
{
    BitReader r(bits);
    return twopart_decode_from(r, n, eps);
}

double quantization_cost(const Pattern& p, const ParamVector& psi, const ParamVector& phi)
{
    if (!is_valid_pattern(p))
        throw Error("invalid pattern");
    if (distinct_count(p) == 1)
        return 0.0;
    double a = pattern_log2_prob(psi, p);
    double b = pattern_log2_prob(phi, p);
    return (a - b) / static_cast<double>(p.size());
}

}  // namespace patternzip
