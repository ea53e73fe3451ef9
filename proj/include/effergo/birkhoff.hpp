#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effergo/budget.hpp"
#include "effergo/clopen.hpp"
#include "effergo/measure.hpp"
#include "effergo/point.hpp"
#include "effergo/reals.hpp"
#include "effergo/transforms.hpp"

namespace effergo {

// ---------------------------------------------------------------------------
// Frequency traces

/// Row m (1-based) describes the orbit point T^(m-1)(p) and g_m.
struct FrequencyTrace {
    std::string transform;
    std::string point;
    ClopenSet set;
    std::vector<Word> orbit_prefixes;
    std::vector<bool> in_set;
    std::vector<std::size_t> counts;  // counts[m-1] = #{k < m : T^k(p) ∈ u}

    std::size_t length() const noexcept { return counts.size(); }
    Rational g(std::size_t m) const { return Rational(counts.at(m - 1)) / Rational(m); }
    Rational last() const { return g(length()); }
};

inline FrequencyTrace frequency_trace(const TransformSpec& t, const ClopenSet& u, const Point& p, std::size_t n,
                                      std::size_t input_budget = std::size_t{1} << 22) {
    (void)t.exact();
    if (n == 0) throw PreconditionError("frequency_trace: n must be positive");
    FrequencyTrace tr;
    tr.transform = t.name();
    tr.point = p.describe();
    tr.set = u;
    tr.orbit_prefixes.reserve(n);
    tr.in_set.reserve(n);
    tr.counts.reserve(n);
    Orbit orbit(t, p, u.max_depth(), input_budget);
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) orbit.advance();
        Word prefix = orbit.current();
        bool inside = u.decide(prefix).value_or(false);
        count += inside ? 1 : 0;
        tr.orbit_prefixes.push_back(std::move(prefix));
        tr.in_set.push_back(inside);
        tr.counts.push_back(count);
    }
    return tr;
}

struct ExceedSet {
    ClopenSet set;
    Rational measure;
};

/// ⋃_{N <= n <= n_max} {ω : g_n(ω) > r}, built from the level sets of the visit count.
inline ExceedSet gn_exceed_set(const TransformSpec& t, const ClopenSet& u, const Rational& r, std::size_t N,
                               std::size_t n_max, const MeasureSpec& m = MeasureSpec::uniform(),
                               const Budget& budget = {}) {
    if (N == 0 || N > n_max) throw PreconditionError("gn_exceed_set: need 1 <= N <= n_max");
    (void)t.exact();
    // levels[c] = {ω : #{k < n : T^k ω ∈ u} = c}
    std::vector<ClopenSet> levels{ClopenSet::full()};
    ClopenSet visit = u;
    ClopenSet result;
    for (std::size_t n = 1; n <= n_max; ++n) {
        if (n > 1) visit = preimage_clopen(t, visit, budget);
        budget.check_depth(visit.max_depth(), "gn_exceed_set refinement");
        std::vector<ClopenSet> next(levels.size() + 1);
        for (std::size_t c = 0; c < levels.size(); ++c) {
            if (levels[c].empty()) continue;
            next[c] = set_union(next[c], difference(levels[c], visit));
            next[c + 1] = set_union(next[c + 1], intersect(levels[c], visit));
        }
        levels = std::move(next);
        if (n < N) continue;
        for (std::size_t c = 0; c < levels.size(); ++c) {
            if (Rational(c) > r * Rational(n)) result = set_union(result, levels[c]);
        }
        budget.check_words(result.size(), "gn_exceed_set");
    }
    Rational mu = measure(result, m);
    return {std::move(result), std::move(mu)};
}

// ---------------------------------------------------------------------------
// Approximable sets

/// A set squeezed between clopen inner and outer approximations at every precision.
struct ApproximableSet {
    std::string name;
    std::function<ClopenSet(std::size_t)> inner;
    std::function<ClopenSet(std::size_t)> outer;

    static ApproximableSet exact(ClopenSet s) {
        return {"clopen", [s](std::size_t) { return s; }, [s](std::size_t) { return s; }};
    }

    /// [0, x) read as a set of binary expansions.
    static ApproximableSet below(const ComputableReal& x) {
        auto cells = [x](std::size_t p, bool outer) {
            if (p > detail::kMaxRotationGrid) throw BudgetError("approximable set precision above 60 bits");
            auto f = x.floor_scaled(p).convert_to<std::uint64_t>();
            std::vector<Word> words;
            detail::dyadic_range(0, outer ? f + 1 : f, p, words);
            return normalize(std::move(words));
        };
        return {"below_" + x.name(), [cells](std::size_t p) { return cells(p, false); },
                [cells](std::size_t p) { return cells(p, true); }};
    }
};

struct ApproximableFrequency {
    Rational low;
    Rational high;
    Rational inner_measure;
    Rational outer_measure;
};

inline ApproximableFrequency approximable_frequency(const ApproximableSet& x, std::size_t precision,
                                                    const TransformSpec& t, const Point& pt, std::size_t n) {
    const ClopenSet inner = x.inner(precision);
    const ClopenSet outer = x.outer(precision);
    return {frequency_trace(t, inner, pt, n).last(), frequency_trace(t, outer, pt, n).last(), measure(inner),
            measure(outer)};
}

// ---------------------------------------------------------------------------
// Experiments

struct PointReport {
    std::string point;
    bool seeded = false;
    Rational g;
    Rational deviation;
    Rational tail_max_deviation;           // over g_m for m in [n/2, n]
    std::optional<Rational> g_high;        // approximable targets: frequency for the outer set
};

struct ExperimentReport {
    std::string transform;
    std::string set;
    std::size_t n = 0;
    Rational mu_low;
    Rational mu_high;
    std::vector<PointReport> points;
    std::size_t seeded = 0;
    double mean_abs_deviation = 0;         // over seeded points
    double max_abs_deviation = 0;
    double tolerance = 0;                  // 3 sigma of a binomial(n, mu) frequency
    bool within_tolerance = true;          // mean seeded deviation <= tolerance
};

namespace detail {

inline Rational abs_diff(const Rational& a, const Rational& b) { return a > b ? Rational(a - b) : Rational(b - a); }

inline Rational distance_to_interval(const Rational& g, const Rational& lo, const Rational& hi) {
    if (g < lo) return lo - g;
    if (g > hi) return g - hi;
    return 0;
}

inline Rational tail_max(const FrequencyTrace& tr, const Rational& lo, const Rational& hi) {
    Rational best = 0;
    for (std::size_t m = std::max<std::size_t>(1, tr.length() / 2); m <= tr.length(); ++m) {
        best = std::max(best, distance_to_interval(tr.g(m), lo, hi));
    }
    return best;
}

} // namespace detail

/// Individual non-random points carry no verdict; only the seeded aggregate is compared to a tolerance.
inline ExperimentReport birkhoff_experiment(const TransformSpec& t, const ApproximableSet& target,
                                            std::size_t precision, const std::vector<Point>& points, std::size_t n,
                                            const MeasureSpec& m = MeasureSpec::uniform()) {
    ExperimentReport rep;
    rep.transform = t.name();
    rep.set = target.name;
    rep.n = n;
    const ClopenSet inner = target.inner(precision);
    const ClopenSet outer = target.outer(precision);
    const bool exact_set = inner == outer;
    rep.mu_low = measure(inner, m);
    rep.mu_high = measure(outer, m);
    double total = 0;
    for (const auto& p : points) {
        PointReport pr;
        pr.point = p.describe();
        pr.seeded = std::holds_alternative<Seeded>(p.generator());
        auto low = frequency_trace(t, inner, p, n);
        pr.g = low.last();
        if (exact_set) {
            pr.deviation = detail::abs_diff(pr.g, rep.mu_low);
            pr.tail_max_deviation = detail::tail_max(low, rep.mu_low, rep.mu_low);
        } else {
            auto high = frequency_trace(t, outer, p, n);
            pr.g_high = high.last();
            pr.deviation = std::max(detail::abs_diff(pr.g, rep.mu_low), detail::abs_diff(*pr.g_high, rep.mu_high));
            pr.tail_max_deviation = std::max(detail::tail_max(low, rep.mu_low, rep.mu_low),
                                             detail::tail_max(high, rep.mu_high, rep.mu_high));
        }
        if (pr.seeded) {
            double d = to_double(pr.deviation);
            total += d;
            rep.max_abs_deviation = std::max(rep.max_abs_deviation, d);
            ++rep.seeded;
        }
        rep.points.push_back(std::move(pr));
    }
    const double mu = to_double(rep.mu_high);
    rep.tolerance = 3.0 * std::sqrt(mu * (1.0 - mu) / static_cast<double>(n));
    if (rep.seeded > 0) {
        rep.mean_abs_deviation = total / static_cast<double>(rep.seeded);
        rep.within_tolerance = rep.mean_abs_deviation <= rep.tolerance;
    }
    return rep;
}

inline ExperimentReport birkhoff_experiment(const TransformSpec& t, const ClopenSet& u,
                                            const std::vector<Point>& points, std::size_t n,
                                            const MeasureSpec& m = MeasureSpec::uniform()) {
    return birkhoff_experiment(t, ApproximableSet::exact(u), 0, points, n, m);
}

// ---------------------------------------------------------------------------
// Integrands

/// Σ c_j · [w_j Ω] with nonnegative rational coefficients.
struct BasicFunction {
    std::vector<std::pair<Rational, Word>> terms;

    std::size_t max_depth() const {
        std::size_t d = 0;
        for (const auto& term : terms) d = std::max(d, term.second.size());
        return d;
    }

    /// Value at any point extending `prefix`; requires |prefix| >= max_depth().
    Rational evaluate(const Word& prefix) const {
        if (prefix.size() < max_depth()) throw PreconditionError("BasicFunction::evaluate: prefix too short");
        Rational v = 0;
        for (const auto& [c, w] : terms) {
            if (w.is_prefix_of(prefix)) v += c;
        }
        return v;
    }
};

inline BasicFunction basic_function(std::vector<std::pair<Rational, Word>> terms) {
    for (const auto& term : terms) {
        if (term.first < 0) throw PreconditionError("basic function coefficients must be nonnegative");
    }
    return {std::move(terms)};
}

inline Rational integral(const BasicFunction& f, const MeasureSpec& m = MeasureSpec::uniform()) {
    Rational total = 0;
    for (const auto& [c, w] : f.terms) total += c * m.cylinder(w);
    return total;
}

/// A lower semicomputable function given by its nondecreasing basic-function stages.
struct LscFunction {
    std::string name;
    std::function<BasicFunction(std::size_t)> stage;

    /// Stage m is Σ_{j=1..m} [1^j]: the length of the leading run of ones.
    static LscFunction leading_run() {
        return {"leading_run", [](std::size_t m) {
                    BasicFunction f;
                    for (std::size_t j = 1; j <= m; ++j) f.terms.emplace_back(Rational(1), Word::repeat(1, j));
                    return f;
                }};
    }

    /// Explicit stages; indices past the end repeat the last stage.
    static LscFunction staged(std::vector<BasicFunction> stages) {
        if (stages.empty()) throw PreconditionError("LscFunction needs at least one stage");
        return {"explicit", [stages = std::move(stages)](std::size_t m) {
                    return stages[std::min(m, stages.size() - 1)];
                }};
    }
};

struct MonotonicityViolation {
    std::size_t stage = 0;  // stage+1 is below stage here
    Word cylinder;
};

/// Compares consecutive stages on every cylinder of their common refinement.
inline std::optional<MonotonicityViolation> check_lsc_monotone(const LscFunction& f, std::size_t stages,
                                                               const Budget& budget = {}) {
    for (std::size_t s = 0; s + 1 < stages; ++s) {
        const BasicFunction lo = f.stage(s);
        const BasicFunction hi = f.stage(s + 1);
        const std::size_t depth = std::max(lo.max_depth(), hi.max_depth());
        budget.check_words(std::size_t{1} << std::min<std::size_t>(depth, 63), "check_lsc_monotone");
        std::optional<MonotonicityViolation> bad;
        for_each_word(depth, [&](const Word& w) {
            if (!bad && hi.evaluate(w) < lo.evaluate(w)) bad = MonotonicityViolation{s, w};
        });
        if (bad) return bad;
    }
    return std::nullopt;
}

/// (1/n) Σ_{k<n} f_stage(T^k(p)).
inline Rational lsc_average(const LscFunction& f, std::size_t stage, const TransformSpec& t, const Point& p,
                            std::size_t n, std::size_t input_budget = std::size_t{1} << 22) {
    (void)t.exact();
    if (n == 0) throw PreconditionError("lsc_average: n must be positive");
    const BasicFunction g = f.stage(stage);
    Orbit orbit(t, p, g.max_depth(), input_budget);
    Rational sum = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) orbit.advance();
        sum += g.evaluate(orbit.current());
    }
    return sum / Rational(n);
}

} // namespace effergo
