#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "patternzip/pattern.hpp"

namespace patternzip {

// Total of the integer CDF handed to the arithmetic coder when a model is
// real-valued.
inline constexpr std::uint64_t kQuantTotal = std::uint64_t{1} << 32;

class Fenwick {
public:
    void push_back(std::uint64_t value);
    void add(std::size_t i, std::uint64_t delta);
    // Sum of elements [0, i).
    std::uint64_t prefix(std::size_t i) const;
    std::size_t size() const { return tree_.size(); }

private:
    std::vector<std::uint64_t> tree_;
};

// A sequential probability assignment. Events at a step are numbered
// 0..event_count()-1; for pattern models event m < C is "index m+1" and
// event C is the new-index event.
class SequentialModel {
public:
    virtual ~SequentialModel() = default;
    virtual std::unique_ptr<SequentialModel> clone() const = 0;

    virtual std::size_t event_count() const = 0;
    virtual double probability(std::size_t event) const = 0;
    // Total probability of events below `event`; cumulative(event_count()) = 1.
    virtual double cumulative(std::size_t event) const = 0;
    virtual void update(std::size_t event) = 0;

    // Integer CDF for the coder. Real-valued models use the quantized form
    // cum(e) = e + floor((kQuantTotal - E) * cumulative(e)), so every event
    // keeps a frequency of at least 1.
    virtual std::uint64_t frequency_total() const { return kQuantTotal; }
    virtual std::uint64_t frequency_cumulative(std::size_t event) const;

    std::size_t position() const { return consumed_; }

protected:
    std::size_t consumed_ = 0;
};

// State shared by models over patterns: running counts and C.
class PatternModelBase : public SequentialModel {
public:
    std::size_t distinct() const { return counts_.size(); }
    std::uint64_t count(std::size_t index0) const { return counts_[index0]; }

protected:
    void record(std::size_t event);
    std::vector<std::uint64_t> counts_;
    Fenwick fenwick_;
};

// Known k-letter alphabet, add-1/2 conditionals. Events are letters.
class KtIidModel final : public SequentialModel {
public:
    explicit KtIidModel(std::size_t k);
    std::unique_ptr<SequentialModel> clone() const override { return std::make_unique<KtIidModel>(*this); }
    std::size_t event_count() const override { return k_; }
    double probability(std::size_t event) const override;
    double cumulative(std::size_t event) const override;
    void update(std::size_t event) override;
    std::uint64_t frequency_total() const override;
    std::uint64_t frequency_cumulative(std::size_t event) const override;

private:
    std::size_t k_;
    std::vector<std::uint64_t> counts_;
    Fenwick fenwick_;
};

class PatternKnownKModel final : public PatternModelBase {
public:
    explicit PatternKnownKModel(std::size_t k);
    std::unique_ptr<SequentialModel> clone() const override { return std::make_unique<PatternKnownKModel>(*this); }
    std::size_t event_count() const override;
    double probability(std::size_t event) const override;
    double cumulative(std::size_t event) const override;
    void update(std::size_t event) override;
    std::uint64_t frequency_total() const override;
    std::uint64_t frequency_cumulative(std::size_t event) const override;
    std::size_t k() const { return k_; }

private:
    std::size_t k_;
};

// Uniform mixture over known-k models j = 2..J, J = min(n, j_max).
// j_max = 0 means uncapped.
class PatternMixtureModel final : public PatternModelBase {
public:
    static constexpr std::size_t kDefaultCap = 4096;
    explicit PatternMixtureModel(std::size_t n, std::size_t j_max = kDefaultCap);
    std::unique_ptr<SequentialModel> clone() const override { return std::make_unique<PatternMixtureModel>(*this); }
    std::size_t event_count() const override { return distinct() + 1; }
    double probability(std::size_t event) const override;
    double cumulative(std::size_t event) const override;
    void update(std::size_t event) override;
    std::size_t components() const { return top_ - 1; }

private:
    std::size_t top_;           // J
    std::size_t first_active_;  // smallest j > C, or top_ + 1 when none
    std::vector<double> w_;     // w_[j - 2]
    double dead_ = 0;           // total weight of components j <= C
    double active_ = 1;         // total weight of components j > C
    double inv_den_ = 0;        // sum over active of w_j / (i - 1 + j/2)
    double new_mass_ = 0;       // sum over active of w_j (j - C)/2 / (i - 1 + j/2)
};

// Add-nu conditionals with innovation mass chi(i, C):
//   existing index m: (n_m + nu) / (i - 1 + C nu + chi)
//   innovation:       chi / (i - 1 + C nu + chi)
// Pattern mode has one new-index event. Letter mode works over M letters
// and splits the innovation mass evenly among the M - C unseen letters.
class GktModel final : public SequentialModel {
public:
    using ChiFn = std::function<double(std::size_t i, std::size_t c)>;
    enum class Mode { Pattern, Letters };

    GktModel(double nu, ChiFn chi, Mode mode = Mode::Pattern, std::size_t alphabet = 0);
    std::unique_ptr<SequentialModel> clone() const override { return std::make_unique<GktModel>(*this); }
    std::size_t event_count() const override;
    double probability(std::size_t event) const override;
    double cumulative(std::size_t event) const override;
    void update(std::size_t event) override;
    std::size_t distinct() const { return distinct_; }

private:
    void refresh();
    double nu_;
    ChiFn chi_;
    Mode mode_;
    std::size_t alphabet_;
    std::size_t distinct_ = 0;
    std::vector<std::uint64_t> counts_;
    Fenwick fenwick_;
    std::vector<std::uint8_t> seen_;  // letter mode
    Fenwick seen_fenwick_;            // letter mode
    double chi_now_ = 0;
    double den_ = 0;
};

// chi = (C + 1)^(1 - eps) / 2
GktModel::ChiFn unknown_k_chi(double eps);

std::unique_ptr<SequentialModel> kt_iid_model(std::size_t k);
std::unique_ptr<SequentialModel> pattern_known_k_model(std::size_t k);
std::unique_ptr<SequentialModel> pattern_mixture_model(std::size_t n, std::size_t j_max = PatternMixtureModel::kDefaultCap);
std::unique_ptr<SequentialModel> pattern_unknown_k_model(double eps);
std::unique_ptr<SequentialModel> gkt_model(double nu, GktModel::ChiFn chi,
                                           GktModel::Mode mode = GktModel::Mode::Pattern, std::size_t alphabet = 0);

// Event for pattern value v given the model's current C (v - 1).
inline std::size_t pattern_event(std::uint32_t v) { return static_cast<std::size_t>(v) - 1; }

// -log2 of the probability assigned to p by a fresh copy of `model`.
double assign_log_prob(const SequentialModel& model, const Pattern& p);
// Per-step conditionals.
std::vector<double> step_probabilities(const SequentialModel& model, const Pattern& p);

struct CodeLengthReport {
    double bits = 0;
    double neg_log_pml = 0;
    double modified_redundancy = 0;  // bits per symbol
    std::size_t n = 0;
    std::size_t k = 0;
};

double neg_log2_pml(const Pattern& p);
CodeLengthReport modified_redundancy(double bits, const Pattern& p);

}  // namespace patternzip
