#include "patternzip/seq_models.hpp"

#include <algorithm>
#include <cmath>

#include "patternzip/simd/kernels.hpp"

namespace patternzip {

void Fenwick::push_back(std::uint64_t value)
{
    std::size_t pos = tree_.size() + 1;
    std::size_t low = pos & (~pos + 1);
    tree_.push_back(0);
    tree_[pos - 1] = value + (prefix(pos - 1) - prefix(pos - low));
}

void Fenwick::add(std::size_t i, std::uint64_t delta)
{
    for (std::size_t pos = i + 1; pos <= tree_.size(); pos += pos & (~pos + 1))
        tree_[pos - 1] += delta;
}

std::uint64_t Fenwick::prefix(std::size_t i) const
{
    std::uint64_t s = 0;
    for (std::size_t pos = i; pos > 0; pos -= pos & (~pos + 1))
        s += tree_[pos - 1];
    return s;
}

std::uint64_t SequentialModel::frequency_cumulative(std::size_t event) const
{
    std::size_t e_count = event_count();
    if (event >= e_count)
        return kQuantTotal;
    double f = std::clamp(cumulative(event), 0.0, 1.0);
    auto span = static_cast<double>(kQuantTotal - e_count);
    return static_cast<std::uint64_t>(event) + static_cast<std::uint64_t>(std::floor(span * f));
}

void PatternModelBase::record(std::size_t event)
{
    if (event == counts_.size()) {
        counts_.push_back(1);
        fenwick_.push_back(1);
    } else {
        ++counts_[event];
        fenwick_.add(event, 1);
    }
    ++consumed_;
}

// ---------------------------------------------------------------------------

KtIidModel::KtIidModel(std::size_t k) : k_(k), counts_(k, 0)
{
    if (k == 0)
        throw Error("alphabet size must be positive");
    for (std::size_t i = 0; i < k; ++i)
        fenwick_.push_back(0);
}

double KtIidModel::probability(std::size_t event) const
{
    if (event >= k_)
        throw Error("symbol outside alphabet");
    return (static_cast<double>(counts_[event]) + 0.5) / (static_cast<double>(consumed_) + 0.5 * static_cast<double>(k_));
}

double KtIidModel::cumulative(std::size_t event) const
{
    if (event >= k_)
        return 1.0;
    double num = static_cast<double>(fenwick_.prefix(event)) + 0.5 * static_cast<double>(event);
    return num / (static_cast<double>(consumed_) + 0.5 * static_cast<double>(k_));
}

void KtIidModel::update(std::size_t event)
{
    if (event >= k_)
        throw Error("symbol outside alphabet");
    ++counts_[event];
    fenwick_.add(event, 1);
    ++consumed_;
}

std::uint64_t KtIidModel::frequency_total() const
{
    std::uint64_t total = 2 * static_cast<std::uint64_t>(consumed_) + k_;
    return total <= kQuantTotal ? total : kQuantTotal;
}

std::uint64_t KtIidModel::frequency_cumulative(std::size_t event) const
{
    std::uint64_t total = 2 * static_cast<std::uint64_t>(consumed_) + k_;
    if (total > kQuantTotal)
        return SequentialModel::frequency_cumulative(event);
    if (event >= k_)
        return total;
    return 2 * fenwick_.prefix(event) + event;
}

// ---------------------------------------------------------------------------

PatternKnownKModel::PatternKnownKModel(std::size_t k) : k_(k)
{
    if (k == 0)
        throw Error("alphabet size must be positive");
}

std::size_t PatternKnownKModel::event_count() const
{
    std::size_t c = distinct();
    return c < k_ ? c + 1 : c;
}

double PatternKnownKModel::probability(std::size_t event) const
{
    std::size_t c = distinct();
    double den = static_cast<double>(consumed_) + 0.5 * static_cast<double>(k_);
    if (event < c)
        return (static_cast<double>(counts_[event]) + 0.5) / den;
    if (event == c && c < k_)
        return 0.5 * static_cast<double>(k_ - c) / den;
    if (event == c)
        throw Error("alphabet exhausted");
    throw Error("index skips the next available value");
}

double PatternKnownKModel::cumulative(std::size_t event) const
{
    if (event >= event_count())
        return 1.0;
    double den = static_cast<double>(consumed_) + 0.5 * static_cast<double>(k_);
    return (static_cast<double>(fenwick_.prefix(event)) + 0.5 * static_cast<double>(event)) / den;
}

void PatternKnownKModel::update(std::size_t event)
{
    std::size_t c = distinct();
    if (event > c)
        throw Error("index skips the next available value");
    if (event == c && c == k_)
        throw Error("alphabet exhausted");
    record(event);
}

std::uint64_t PatternKnownKModel::frequency_total() const
{
    std::uint64_t total = 2 * static_cast<std::uint64_t>(consumed_) + k_;
    return total <= kQuantTotal ? total : kQuantTotal;
}

std::uint64_t PatternKnownKModel::frequency_cumulative(std::size_t event) const
{
    std::uint64_t total = 2 * static_cast<std::uint64_t>(consumed_) + k_;
    if (total > kQuantTotal)
        return SequentialModel::frequency_cumulative(event);
    if (event >= event_count())
        return total;
    return 2 * fenwick_.prefix(event) + event;
}

// ---------------------------------------------------------------------------

PatternMixtureModel::PatternMixtureModel(std::size_t n, std::size_t j_max)
{
    if (n == 0)
        throw Error("mixture needs a positive length");
    std::size_t top = (j_max == 0) ? n : std::min(n, j_max);
    top_ = std::max<std::size_t>(top, 2);
    first_active_ = 2;
    w_.assign(top_ - 1, 1.0 / static_cast<double>(top_ - 1));
    // First step: den_j = j/2 and every component puts all mass on the
    // new-index event.
    for (std::size_t j = 2; j <= top_; ++j)
        inv_den_ += w_[j - 2] / (0.5 * static_cast<double>(j));
    new_mass_ = 1.0;
    active_ = 1.0;
}

double PatternMixtureModel::probability(std::size_t event) const
{
    std::size_t c = distinct();
    double total = active_ + dead_;
    double share = dead_ / static_cast<double>(c + 1);
    if (event < c)
        return ((static_cast<double>(counts_[event]) + 0.5) * inv_den_ + share) / total;
    if (event == c)
        return (new_mass_ + share) / total;
    throw Error("index skips the next available value");
}

double PatternMixtureModel::cumulative(std::size_t event) const
{
    std::size_t c = distinct();
    if (event > c)
        return 1.0;
    double total = active_ + dead_;
    double share = dead_ / static_cast<double>(c + 1);
    double e = static_cast<double>(event);
    return ((static_cast<double>(fenwick_.prefix(event)) + 0.5 * e) * inv_den_ + e * share) / total;
}

void PatternMixtureModel::update(std::size_t event)
{
    std::size_t c = distinct();
    if (event > c)
        throw Error("index skips the next available value");
    bool fresh = event == c;
    double scale = 1.0 / (active_ + dead_);
    double dead = c > 0 ? (dead_ / static_cast<double>(c + 1)) * scale : 0.0;

    std::size_t j0 = first_active_;
    double num_base, num_slope;
    if (fresh) {
        num_base = 0.5 * (static_cast<double>(j0) - static_cast<double>(c));
        num_slope = 0.5;
    } else {
        num_base = static_cast<double>(counts_[event]) + 0.5;
        num_slope = 0.0;
    }
    double den_base = static_cast<double>(consumed_) + 0.5 * static_cast<double>(j0);
    std::size_t c_next = fresh ? c + 1 : c;

    if (fresh && j0 == c_next && j0 <= top_) {
        // Component j = C + 1 takes this step, then moves to the uniform group.
        double v = ((w_[j0 - 2] * num_base) / den_base) * scale;
        if (v < simd::kWeightFloor)
            v = 0;
        dead += v;
        w_[j0 - 2] = 0;
        ++j0;
        num_base += num_slope;
        den_base += 0.5;
    }

    simd::MixtureSums sums;
    if (j0 <= top_) {
        double next_num_base = 0.5 * (static_cast<double>(j0) - static_cast<double>(c_next));
        sums = simd::kernels().mixture_step(w_.data() + (j0 - 2), top_ - j0 + 1, num_base, num_slope, den_base, scale,
                                            next_num_base);
    }
    active_ = sums.weight;
    inv_den_ = sums.inv_den;
    new_mass_ = sums.new_mass;
    dead_ = dead;
    first_active_ = j0;
    record(event);
}

// ---------------------------------------------------------------------------

GktModel::GktModel(double nu, ChiFn chi, Mode mode, std::size_t alphabet)
    : nu_(nu), chi_(std::move(chi)), mode_(mode), alphabet_(alphabet)
{
    if (!(nu > 0))
        throw Error("nu must be positive");
    if (mode_ == Mode::Letters) {
        if (alphabet_ == 0)
            throw Error("letter mode needs a positive alphabet bound");
        counts_.assign(alphabet_, 0);
        seen_.assign(alphabet_, 0);
        for (std::size_t i = 0; i < alphabet_; ++i) {
            fenwick_.push_back(0);
            seen_fenwick_.push_back(0);
        }
    }
    refresh();
}

void GktModel::refresh()
{
    bool saturated = mode_ == Mode::Letters && distinct_ == alphabet_;
    chi_now_ = saturated ? 0.0 : chi_(consumed_ + 1, distinct_);
    if (!(chi_now_ >= 0))
        throw Error("innovation mass must be nonnegative");
    den_ = static_cast<double>(consumed_) + static_cast<double>(distinct_) * nu_ + chi_now_;
    if (!(den_ > 0))
        throw Error("innovation mass must be positive at the first step");
}

std::size_t GktModel::event_count() const
{
    return mode_ == Mode::Pattern ? distinct_ + 1 : alphabet_;
}

double GktModel::probability(std::size_t event) const
{
    if (mode_ == Mode::Pattern) {
        if (event < distinct_)
            return (static_cast<double>(counts_[event]) + nu_) / den_;
        if (event == distinct_)
            return chi_now_ / den_;
        throw Error("index skips the next available value");
    }
    if (event >= alphabet_)
        throw Error("symbol outside alphabet");
    if (seen_[event])
        return (static_cast<double>(counts_[event]) + nu_) / den_;
    return chi_now_ / (static_cast<double>(alphabet_ - distinct_) * den_);
}

double GktModel::cumulative(std::size_t event) const
{
    if (mode_ == Mode::Pattern) {
        if (event > distinct_)
            return 1.0;
        return (static_cast<double>(fenwick_.prefix(event)) + static_cast<double>(event) * nu_) / den_;
    }
    if (event >= alphabet_)
        return 1.0;
    double seen = static_cast<double>(seen_fenwick_.prefix(event));
    double unseen = static_cast<double>(event) - seen;
    double per_unseen = distinct_ < alphabet_ ? chi_now_ / static_cast<double>(alphabet_ - distinct_) : 0.0;
    return (static_cast<double>(fenwick_.prefix(event)) + seen * nu_ + unseen * per_unseen) / den_;
}

void GktModel::update(std::size_t event)
{
    if (mode_ == Mode::Pattern) {
        if (event > distinct_)
            throw Error("index skips the next available value");
        if (event == distinct_) {
            counts_.push_back(1);
            fenwick_.push_back(1);
            ++distinct_;
        } else {
            ++counts_[event];
            fenwick_.add(event, 1);
        }
    } else {
        if (event >= alphabet_)
            throw Error("symbol outside alphabet");
        if (!seen_[event]) {
            seen_[event] = 1;
            seen_fenwick_.add(event, 1);
            ++distinct_;
        }
        ++counts_[event];
        fenwick_.add(event, 1);
    }
    ++consumed_;
    refresh();
}

GktModel::ChiFn unknown_k_chi(double eps)
{
    return [eps](std::size_t, std::size_t c) { return 0.5 * std::pow(static_cast<double>(c + 1), 1.0 - eps); };
}

std::unique_ptr<SequentialModel> kt_iid_model(std::size_t k) { return std::make_unique<KtIidModel>(k); }

std::unique_ptr<SequentialModel> pattern_known_k_model(std::size_t k)
{
    return std::make_unique<PatternKnownKModel>(k);
}

std::unique_ptr<SequentialModel> pattern_mixture_model(std::size_t n, std::size_t j_max)
{
    if (n < 2)
        n = 2;
    return std::make_unique<PatternMixtureModel>(n, j_max);
}

std::unique_ptr<SequentialModel> pattern_unknown_k_model(double eps)
{
    if (!(eps > 0) || !(eps < 1))
        throw Error("eps must lie in (0, 1)");
    return std::make_unique<GktModel>(0.5, unknown_k_chi(eps));
}

std::unique_ptr<SequentialModel> gkt_model(double nu, GktModel::ChiFn chi, GktModel::Mode mode, std::size_t alphabet)
{
    return std::make_unique<GktModel>(nu, std::move(chi), mode, alphabet);
}

double assign_log_prob(const SequentialModel& model, const Pattern& p)
{
    auto m = model.clone();
    double bits = 0;
    for (auto v : p) {
        std::size_t e = pattern_event(v);
        double q = m->probability(e);
        if (!(q > 0))
            throw Error("model assigned zero probability");
        bits -= std::log2(q);
        m->update(e);
    }
    return bits;
}

std::vector<double> step_probabilities(const SequentialModel& model, const Pattern& p)
{
    auto m = model.clone();
    std::vector<double> out;
    out.reserve(p.size());
    for (auto v : p) {
        std::size_t e = pattern_event(v);
        out.push_back(m->probability(e));
        m->update(e);
    }
    return out;
}

double neg_log2_pml(const Pattern& p)
{
    auto counts = occurrence_counts(p);
    double n = static_cast<double>(p.size());
    double s = 0;
    for (auto c : counts) {
        double x = static_cast<double>(c);
        s -= x * std::log2(x / n);
    }
    return s;
}

CodeLengthReport modified_redundancy(double bits, const Pattern& p)
{
    CodeLengthReport r;
    r.bits = bits;
    r.n = p.size();
    r.k = distinct_count(p);
    r.neg_log_pml = neg_log2_pml(p);
    r.modified_redundancy = (bits - r.neg_log_pml) / static_cast<double>(r.n);
    return r;
}

}  // namespace patternzip
