#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "patternzip/exact_pattern.hpp"
#include "patternzip/rng.hpp"

namespace patternzip {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr int kRestarts = 16;
constexpr double kTolerance = 1e-10;
constexpr double kGradientTolerance = 1e-6;
constexpr double kPolishStep = 0.01;

struct Objective {
    const std::vector<std::uint64_t>* counts;
    std::size_t k;
    double n;
};

ParamVector softmax(const gsl_vector* z, std::size_t k)
{
    ParamVector t(k);
    double top = 0;
    for (std::size_t i = 0; i + 1 < k; ++i)
        top = std::max(top, gsl_vector_get(z, i));
    double s = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double zi = i + 1 < k ? gsl_vector_get(z, i) : 0.0;
        t[i] = std::exp(zi - top);
        s += t[i];
    }
    for (auto& x : t)
        x /= s;
    return t;
}

double negative_log_prob(const gsl_vector* z, void* data)
{
    auto* obj = static_cast<Objective*>(data);
    ParamVector t = softmax(z, obj->k);
    for (double x : t)
        if (!(x > 0))
            return std::numeric_limits<double>::max();
    PatternProbEngine engine(t);
    double lp = engine.log_prob(*obj->counts);
    return std::isfinite(lp) ? -lp : std::numeric_limits<double>::max();
}

// Gradient in z: n t_i - a_i, with a the expected count on letter i.
void negative_log_prob_gradient(const gsl_vector* z, void* data, double* value, gsl_vector* grad)
{
    auto* obj = static_cast<Objective*>(data);
    ParamVector t = softmax(z, obj->k);
    for (double x : t) {
        if (!(x > 0)) {
            *value = std::numeric_limits<double>::max();
            gsl_vector_set_zero(grad);
            return;
        }
    }
    PatternProbEngine engine(t);
    std::vector<double> dlog;
    double lp = engine.log_prob_gradient(*obj->counts, dlog);
    std::vector<std::size_t> order(obj->k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    std::vector<double> a(obj->k);
    for (std::size_t m = 0; m < obj->k; ++m)
        a[order[m]] = dlog[m];
    *value = std::isfinite(lp) ? -lp : std::numeric_limits<double>::max();
    for (std::size_t i = 0; i + 1 < obj->k; ++i)
        gsl_vector_set(grad, i, obj->n * t[i] - a[i]);
}

double value_only(const gsl_vector* z, void* data)
{
    return negative_log_prob(z, data);
}

void gradient_only(const gsl_vector* z, void* data, gsl_vector* grad)
{
    double v = 0;
    negative_log_prob_gradient(z, data, &v, grad);
}

struct Run {
    double value;
    ParamVector theta;
    bool converged;
};

void to_logits(const ParamVector& start, gsl_vector* x)
{
    const std::size_t dim = start.size() - 1;
    double last = std::log(std::max(start[dim], 1e-300));
    for (std::size_t i = 0; i < dim; ++i)
        gsl_vector_set(x, i, std::log(std::max(start[i], 1e-300)) - last);
}

// Simplex search to the final tolerance.
Run polish(Objective& obj, const ParamVector& start)
{
    const std::size_t dim = obj.k - 1;
    gsl_vector* x = gsl_vector_alloc(dim);
    gsl_vector* step = gsl_vector_alloc(dim);
    to_logits(start, x);
    gsl_vector_set_all(step, kPolishStep);

    gsl_multimin_function fn{&negative_log_prob, dim, &obj};
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(s, &fn, x, step);

    bool converged = false;
    const std::size_t cap = 600 * obj.k;
    double previous = std::numeric_limits<double>::max();
    std::size_t flat = 0;
    for (std::size_t it = 0; it < cap; ++it) {
        if (gsl_multimin_fminimizer_iterate(s))
            break;
        double size = gsl_multimin_fminimizer_size(s);
        double value = s->fval;
        flat = (previous - value <= kTolerance) ? flat + 1 : 0;
        previous = value;
        if (gsl_multimin_test_size(size, 1e-9) == GSL_SUCCESS || (flat > 20 * obj.k && size < 1e-5)) {
            converged = true;
            break;
        }
    }
    Run run{s->fval, softmax(s->x, obj.k), converged};
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return run;
}

// Quasi-Newton descent on the exact gradient, to a coarse tolerance.
Run descend(Objective& obj, const ParamVector& start)
{
    const std::size_t dim = obj.k - 1;
    gsl_vector* x = gsl_vector_alloc(dim);
    to_logits(start, x);
    gsl_multimin_function_fdf fn{&value_only, &gradient_only, &negative_log_prob_gradient, dim, &obj};
    gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, dim);
    gsl_multimin_fdfminimizer_set(s, &fn, x, 0.1, 0.1);
    bool converged = false;
    for (std::size_t it = 0; it < 200 * obj.k; ++it) {
        if (gsl_multimin_fdfminimizer_iterate(s))
            break;
        if (gsl_multimin_test_gradient(s->gradient, kGradientTolerance) == GSL_SUCCESS) {
            converged = true;
            break;
        }
    }
    Run run{s->f, softmax(s->x, obj.k), converged};
    gsl_multimin_fdfminimizer_free(s);
    gsl_vector_free(x);
    return run;
}

std::mutex cache_mutex;
std::map<std::vector<std::uint64_t>, PatternMlEstimate> cache;
constexpr std::size_t kCacheLimit = 4096;

}  // namespace

PatternMlEstimate pattern_ml_estimate_counts(std::vector<std::uint64_t> counts)
{
    if (counts.empty())
        throw Error("empty pattern");
    if (counts.size() > kPatternMlLimit)
        throw Error("too many distinct indices for pattern ML estimation");
    std::sort(counts.begin(), counts.end());
    {
        std::lock_guard lock(cache_mutex);
        auto it = cache.find(counts);
        if (it != cache.end())
            return it->second;
    }

    const std::size_t k = counts.size();
    PatternMlEstimate est;
    if (k == 1) {
        est.psi = {1.0};
        est.log2_prob = 0;
    } else {
        std::uint64_t n = 0;
        for (auto c : counts)
            n += c;
        ParamVector empirical(k);
        for (std::size_t i = 0; i < k; ++i)
            empirical[i] = static_cast<double>(counts[i]) / static_cast<double>(n);

        Objective obj{&counts, k, static_cast<double>(n)};
        Run best = descend(obj, empirical);
        std::uint64_t key = 0;
        for (auto c : counts)
            key = mix64(key ^ c);
        for (int r = 0; r < kRestarts; ++r) {
            CounterRng rng(key, 0x4D4Cu, static_cast<std::uint64_t>(r));
            Run run = descend(obj, sample_simplex(k, rng));
            if (run.value < best.value)
                best = run;
        }
        Run polished = polish(obj, best.theta);
        bool converged = best.converged || polished.converged;
        if (polished.value <= best.value)
            best = polished;
        std::sort(best.theta.begin(), best.theta.end());
        est.psi = best.theta;
        est.log2_prob = -best.value / kLn2;
        est.converged = converged;
    }

    std::lock_guard lock(cache_mutex);
    if (cache.size() >= kCacheLimit)
        cache.clear();
    cache.emplace(counts, est);
    return est;
}

PatternMlEstimate pattern_ml_estimate(const Pattern& p)
{
    if (!is_valid_pattern(p))
        throw Error("invalid pattern");
    return pattern_ml_estimate_counts(occurrence_counts(p));
}

}  // namespace patternzip
