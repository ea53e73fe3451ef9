#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effergo/budget.hpp"
#include "effergo/clopen.hpp"
#include "effergo/effopen.hpp"
#include "effergo/measure.hpp"
#include "effergo/transforms.hpp"

namespace effergo {

// ---------------------------------------------------------------------------
// Certificates

struct CoverStage {
    ClopenSet set;
    Rational measure;
    Rational bound;
};

/// mu(I ∩ T^-n(A)) versus mu(A ∩ T^n(I)) for one shift n of the bidirectional shift.
struct IdentityCheck {
    std::int64_t n = 0;
    Rational lhs;
    Rational rhs;
};

struct CoverParams {
    Rational r;
    std::optional<Rational> s;
    std::optional<std::size_t> k;
    std::optional<std::size_t> n;
    std::optional<std::size_t> N;
    std::optional<std::size_t> fuel;
    std::optional<Rational> epsilon;
    std::optional<std::size_t> k_used;
    std::optional<std::string> x;           // interval: an Ω word, or a bidirectional assignment "i:b,..."
    std::optional<std::string> transform;
    std::optional<std::string> certified_by;
    std::vector<std::int64_t> shifts;
    ClopenSet a;                            // the input set the construction covers the core of
};

/// A cover of an invariant core A* with exactly checked measure bounds.
///
/// `mode` is "exact" when every stage was computed from a clopen input, or
/// "assumed" when the input was an enumerated open set truncated at some fuel;
/// assumed certificates are never `verified`.
struct CoverCertificate {
    std::string construction;
    std::string mode = "exact";
    MeasureSpec measure = MeasureSpec::uniform();
    CoverParams params;
    std::vector<CoverStage> stages;
    std::vector<IdentityCheck> identity_checks;
    bool verified = false;
};

namespace detail {

inline bool stages_within_bounds(const std::vector<CoverStage>& stages) {
    return std::all_of(stages.begin(), stages.end(), [](const CoverStage& st) { return st.measure <= st.bound; });
}

inline CoverStage make_stage(ClopenSet set, Rational bound, const MeasureSpec& m) {
    Rational mu = measure(set, m);
    return {std::move(set), std::move(mu), std::move(bound)};
}

inline void require_fraction_below_one(const Rational& r, const char* what) {
    if (r >= 1) throw PreconditionError(std::string(what) + ": r must be < 1, got " + to_string(r));
    if (r < 0) throw PreconditionError(std::string(what) + ": r must be >= 0, got " + to_string(r));
}

inline void require_measure_at_most(const ClopenSet& a, const Rational& r, const MeasureSpec& m, const char* what) {
    Rational mu = measure(a, m);
    if (mu > r) {
        throw PreconditionError(std::string(what) + ": measure(a) = " + to_string(mu) + " exceeds r = " +
                                to_string(r));
    }
}

inline std::string describe_assignment(const BiAssignment& x) {
    std::string out;
    for (const auto& [i, b] : x) {
        if (!out.empty()) out += ",";
        out += std::to_string(i) + ":" + std::to_string(b);
    }
    return out;
}

// Iterates a per-interval construction: stage 0 is `a`, stage j+1 is the
// union of step(x) over the words x of stage j, with bound factor * bound_j.
template <typename Step>
std::vector<CoverStage> iterate_stages(const ClopenSet& a, const Rational& r0, const Rational& factor, std::size_t k,
                                       const MeasureSpec& m, const Budget& budget, Step step) {
    std::vector<CoverStage> stages;
    stages.push_back(make_stage(a, r0, m));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Word> words;
        for (const auto& x : stages.back().set.words()) {
            auto piece = step(x);
            words.insert(words.end(), piece.words().begin(), piece.words().end());
            budget.check_words(words.size(), "cover stage");
        }
        Rational bound = stages.back().bound * factor;
        stages.push_back(make_stage(normalize(std::move(words)), std::move(bound), m));
    }
    return stages;
}

} // namespace detail

struct CertificateCheck {
    bool ok = true;
    std::vector<std::string> problems;
};

/// Recomputes every stage measure from the stage sets alone.
inline CertificateCheck verify_certificate(const CoverCertificate& cert) {
    CertificateCheck check;
    auto fail = [&](std::string msg) {
        check.ok = false;
        check.problems.push_back(std::move(msg));
    };
    for (std::size_t i = 0; i < cert.stages.size(); ++i) {
        const auto& st = cert.stages[i];
        if (!ClopenSet::is_canonical(st.set.words())) fail("stage " + std::to_string(i) + ": set is not canonical");
        Rational mu = measure(st.set, cert.measure);
        if (mu != st.measure) {
            fail("stage " + std::to_string(i) + ": recorded measure " + to_string(st.measure) + " but recomputed " +
                 to_string(mu));
        }
        if (mu > st.bound) {
            fail("stage " + std::to_string(i) + ": measure " + to_string(mu) + " exceeds bound " +
                 to_string(st.bound));
        }
        if (i > 0 && !(st.bound < cert.stages[i - 1].bound)) {
            fail("stage " + std::to_string(i) + ": bound does not decrease");
        }
    }
    for (const auto& ic : cert.identity_checks) {
        if (ic.lhs != ic.rhs) fail("identity check at shift " + std::to_string(ic.n) + " does not balance");
    }
    if (cert.verified && cert.mode != "exact") fail("an assumed-mode certificate cannot be verified");
    if (cert.verified && !check.ok) fail("certificate claims verified but checks fail");
    return check;
}

// ---------------------------------------------------------------------------
// Deletion of prefixes (the shift)

/// x·a: covers the core points inside xΩ.
inline ClopenSet kucera_step(const ClopenSet& a, const Rational& r, const Word& x) {
    detail::require_fraction_below_one(r, "kucera_step");
    detail::require_measure_at_most(a, r, MeasureSpec::uniform(), "kucera_step");
    return concat_prefix(x, a);
}

/// Stages A_0 = a, A_{j+1} = ⋃_{x ∈ A_j} x·a, with bounds r^(j+1).
inline CoverCertificate kucera_iterate(const ClopenSet& a, const Rational& r, std::size_t k, const Budget& budget = {}) {
    detail::require_fraction_below_one(r, "kucera_iterate");
    const auto m = MeasureSpec::uniform();
    detail::require_measure_at_most(a, r, m, "kucera_iterate");
    CoverCertificate cert;
    cert.construction = "kucera";
    cert.params.r = r;
    cert.params.k = k;
    cert.params.a = a;
    cert.stages = detail::iterate_stages(a, r, r, k, m, budget, [&](const Word& x) { return concat_prefix(x, a); });
    cert.verified = detail::stages_within_bounds(cert.stages);
    return cert;
}

/// A greedy block decomposition of a point prefix into words of a prefix-free set.
struct Factorization {
    std::vector<Word> blocks;
    std::size_t consumed = 0;                   // bits covered by complete blocks
    std::optional<std::size_t> failure_position;
};

inline Factorization block_factorization_witness(const std::vector<Word>& s, const Point& p, std::size_t max_len) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].empty()) throw PreconditionError("block set may not contain the empty word");
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (i != j && s[i].is_prefix_of(s[j])) {
                throw PreconditionError("block set is not prefix-free: '" + s[i].str() + "' is a prefix of '" +
                                        s[j].str() + "'");
            }
        }
    }
    const Word prefix = p.prefix_of(max_len);
    Factorization f;
    while (f.consumed < max_len) {
        const Word rest = prefix.suffix_from(f.consumed);
        const Word* match = nullptr;
        bool partial = false;
        for (const auto& w : s) {
            if (w.is_prefix_of(rest)) {
                match = &w;
                break;
            }
            if (rest.is_prefix_of(w)) partial = true;
        }
        if (match == nullptr) {
            if (!partial) f.failure_position = f.consumed;
            break;  // a partial match means the prefix ended mid-block
        }
        f.blocks.push_back(*match);
        f.consumed += match->size();
    }
    return f;
}

// ---------------------------------------------------------------------------
// Finite changes of bits

/// x·B with B = ⋂_{|y| = |x|} {w : y w ∈ a}.
inline ClopenSet finite_change_cover(const ClopenSet& a, const Word& x) {
    if (measure(a) >= 1) throw PreconditionError("finite_change_cover: measure(a) must be < 1");
    return concat_prefix(x, common_section(a, x.size()));
}

inline CoverCertificate finite_change_iterate(const ClopenSet& a, const Rational& r, std::size_t k,
                                              const Budget& budget = {}) {
    detail::require_fraction_below_one(r, "finite_change_iterate");
    const auto m = MeasureSpec::uniform();
    detail::require_measure_at_most(a, r, m, "finite_change_iterate");
    CoverCertificate cert;
    cert.construction = "finite-change";
    cert.params.r = r;
    cert.params.k = k;
    cert.params.a = a;
    cert.stages = detail::iterate_stages(a, r, r, k, m, budget,
                                         [&](const Word& x) { return finite_change_cover(a, x); });
    cert.verified = detail::stages_within_bounds(cert.stages);
    return cert;
}

// ---------------------------------------------------------------------------
// Addition of prefixes

struct PrefixFamily {
    std::vector<Word> prefixes;  // z_1 = Λ, then every uncovered interval of each round
    ClopenSet remainder;         // Ω minus the union of the z_i x Ω
    std::size_t rounds = 0;
};

namespace detail {

inline PrefixFamily prefix_family_impl(const Word& x, const std::function<bool(const PrefixFamily&)>& done,
                                       const Budget& budget) {
    if (x.empty()) throw PreconditionError("prefix_family: x must be nonempty");
    const ClopenSet outside_x = complement(ClopenSet{x});
    PrefixFamily fam;
    fam.remainder = ClopenSet::full();
    while (!done(fam)) {
        // Inside each uncovered interval uΩ select uxΩ, in canonical order of u.
        std::vector<Word> next;
        for (const auto& u : fam.remainder.words()) {
            fam.prefixes.push_back(u);
            for (const auto& v : outside_x.words()) next.push_back(u + v);
            budget.check_words(next.size(), "prefix_family remainder");
        }
        fam.remainder = normalize(std::move(next));
        ++fam.rounds;
    }
    return fam;
}

} // namespace detail

/// Prefixes z_i with pairwise disjoint z_i x Ω covering all of Ω but at most delta.
inline PrefixFamily prefix_family(const Word& x, const Rational& delta, const Budget& budget = {}) {
    if (delta <= 0 || delta >= 1) throw PreconditionError("prefix_family: delta must lie in (0,1)");
    return detail::prefix_family_impl(
        x, [&](const PrefixFamily& f) { return f.rounds > 0 && measure(f.remainder) <= delta; }, budget);
}

/// The family after exactly `rounds` rounds.
inline PrefixFamily prefix_family_rounds(const Word& x, std::size_t rounds, const Budget& budget = {}) {
    return detail::prefix_family_impl(x, [&](const PrefixFamily& f) { return f.rounds >= rounds; }, budget);
}

/// The remainder tolerance used so that min density over the family closes below s.
inline Rational prefix_addition_delta(const Rational& r, const Rational& s) { return (s - r) / (2 * (1 + r)); }

struct PrefixAdditionStage {
    ClopenSet set;
    Rational measure;
    Rational bound;
    Rational delta;
    PrefixFamily family;
};

/// xΩ ∩ ⋂_i {w : z_i w ∈ a}; exact measure at most s·2^-|x|.
inline PrefixAdditionStage prefix_addition_cover(const ClopenSet& a, const Rational& r, const Rational& s,
                                                 const Word& x, const Budget& budget = {}) {
    const auto m = MeasureSpec::uniform();
    if (!(r < s)) throw PreconditionError("prefix_addition_cover: need r < s");
    detail::require_fraction_below_one(s, "prefix_addition_cover");
    detail::require_measure_at_most(a, r, m, "prefix_addition_cover");
    PrefixAdditionStage out;
    out.delta = prefix_addition_delta(r, s);
    out.bound = s * dyadic(x.size());
    out.set = ClopenSet{x};
    if (a.empty()) {
        out.set = {};
        out.measure = 0;
        return out;
    }
    out.family = prefix_family(x, out.delta, budget);
    for (const auto& z : out.family.prefixes) {
        out.set = intersect(out.set, shift_section(z, a));
        if (out.set.empty()) break;
    }
    out.measure = measure(out.set, m);
    return out;
}

inline CoverCertificate prefix_addition_iterate(const ClopenSet& a, const Rational& r, const Rational& s,
                                                std::size_t k, const Budget& budget = {}) {
    const auto m = MeasureSpec::uniform();
    if (!(r < s)) throw PreconditionError("prefix_addition_iterate: need r < s");
    detail::require_fraction_below_one(s, "prefix_addition_iterate");
    detail::require_measure_at_most(a, r, m, "prefix_addition_iterate");
    CoverCertificate cert;
    cert.construction = "prefix-add";
    cert.params.r = r;
    cert.params.s = s;
    cert.params.k = k;
    cert.params.a = a;
    cert.stages = detail::iterate_stages(a, r, s, k, m, budget, [&](const Word& x) {
        return prefix_addition_cover(a, r, s, x, budget).set;
    });
    cert.verified = detail::stages_within_bounds(cert.stages);
    return cert;
}

// ---------------------------------------------------------------------------
// Independent intervals

/// The defining inequality (d+eps)·r + d(1-d)/(k·eps²) <= s·d.
inline bool lemma1_holds(const Rational& d, const Rational& r, const Rational& s, const Rational& eps,
                         std::size_t k) {
    if (k == 0) return false;
    return (d + eps) * r + d * (1 - d) / (Rational(k) * eps * eps) <= s * d;
}

/// Minimal k for which k independent intervals of measure d have average
/// intersection with any set of measure <= r at most s·d.
inline std::size_t lemma1_k(const Rational& d, const Rational& r, const Rational& s, const Rational& eps) {
    if (d <= 0 || d > 1) throw PreconditionError("lemma1_k: d must lie in (0,1]");
    if (r < 0 || !(r < s) || s >= 1) throw PreconditionError("lemma1_k: need 0 <= r < s < 1");
    if (eps <= 0) throw PreconditionError("lemma1_k: epsilon must be positive");
    const Rational slack = s * d - (d + eps) * r;
    if (slack <= 0) {
        throw PreconditionError("lemma1_k: epsilon " + to_string(eps) +
                                " too large, (d+epsilon)·r must stay below s·d; choose a smaller epsilon");
    }
    Integer k = ceil_of(d * (1 - d) / (eps * eps * slack));
    if (k < 1) k = 1;
    return k.convert_to<std::size_t>();
}

/// The epsilon minimizing lemma1_k's Chebyshev bound, capped at 1 - d.
inline Rational default_lemma1_epsilon(const Rational& d, const Rational& r, const Rational& s) {
    Rational cap = d < 1 ? Rational(1 - d) : Rational(1);
    if (r == 0) return cap;
    Rational best = 2 * d * (s - r) / (3 * r);
    return best < cap ? best : cap;
}

/// Index span of a bidirectional assignment (max - min + 1), 0 when empty.
inline std::size_t assignment_span(const BiAssignment& x) {
    if (x.empty()) return 0;
    return static_cast<std::size_t>(x.rbegin()->first - x.begin()->first + 1);
}

/// T^n(I_x) for the bidirectional shift: constraint i moves to i - n.
inline BiAssignment shift_assignment(const BiAssignment& x, std::int64_t n) {
    BiAssignment out;
    for (const auto& [i, b] : x) out[i - n] = b;
    return out;
}

struct ShiftedCoverStage {
    ClopenSet set;
    Rational measure;
    Rational bound;
    Rational epsilon;
    std::size_t k = 0;
    std::size_t k_used = 0;
    std::size_t N = 0;
    std::vector<std::int64_t> shifts;
    std::vector<IdentityCheck> checks;
    bool verified = false;
};

namespace detail {

struct ShiftedCoverSetup {
    ClopenSet interval;
    Rational d;
    Rational bound;
    Rational eps;
    std::size_t k = 0;
};

inline ShiftedCoverSetup shifted_cover_setup(const ClopenSet& a, const Rational& r, const Rational& s,
                                             const BiAssignment& x, const std::optional<Rational>& epsilon,
                                             const Budget& budget, const char* what) {
    const auto m = MeasureSpec::uniform();
    if (!(r < s)) throw PreconditionError(std::string(what) + ": need r < s");
    require_fraction_below_one(s, what);
    require_measure_at_most(a, r, m, what);
    ShiftedCoverSetup setup;
    setup.interval = embed_bidirectional(x, budget);
    setup.d = dyadic(x.size());
    setup.bound = s * setup.d;
    setup.eps = epsilon ? *epsilon : default_lemma1_epsilon(setup.d, r, s);
    setup.k = setup.d == 1 ? 1 : lemma1_k(setup.d, r, s, setup.eps);
    return setup;
}

// Intersects the interval with T^-n(a) for successive shifts n, stopping as
// soon as the exact measure reaches the bound.
inline void intersect_shift(ShiftedCoverStage& st, const ClopenSet& a, const BiAssignment& x, std::int64_t n,
                            const Budget& budget) {
    const auto m = MeasureSpec::uniform();
    ClopenSet pre = preimage_clopen(bidirectional_shift_transform(n, budget), a, budget);
    Rational left = measure(intersect(embed_bidirectional(x, budget), pre), m);
    Rational right = measure(intersect(a, embed_bidirectional(shift_assignment(x, n), budget)), m);
    st.checks.push_back({n, std::move(left), std::move(right)});
    st.set = intersect(st.set, pre);
    st.measure = measure(st.set, m);
    st.shifts.push_back(n);
    ++st.k_used;
}

inline void finish_shifted(ShiftedCoverStage& st) {
    bool identities = std::all_of(st.checks.begin(), st.checks.end(),
                                  [](const IdentityCheck& c) { return c.lhs == c.rhs; });
    st.verified = identities && st.measure <= st.bound;
}

} // namespace detail

/// I_x ∩ ⋂_{1 <= i <= k} T^-(iN)(a) under the bidirectional shift, with N = span(x) + 1.
///
/// `a` and the result are in zig-zag coordinates. The intersection stops at
/// the first i whose exact measure is already within s·mu(I_x); k from
/// lemma1_k guarantees that happens by i = k.
inline ShiftedCoverStage bidirectional_cover(const ClopenSet& a, const Rational& r, const Rational& s,
                                             const BiAssignment& x, std::optional<Rational> epsilon = std::nullopt,
                                             const Budget& budget = {}) {
    auto setup = detail::shifted_cover_setup(a, r, s, x, epsilon, budget, "bidirectional_cover");
    ShiftedCoverStage st;
    st.bound = setup.bound;
    st.epsilon = setup.eps;
    st.k = setup.k;
    st.N = assignment_span(x) + 1;
    st.set = setup.interval;
    st.measure = measure(st.set);
    if (a.empty()) {
        st.set = {};
        st.measure = 0;
        st.verified = true;
        return st;
    }
    for (std::size_t i = 1; i <= st.k && st.measure > st.bound; ++i) {
        const auto n = static_cast<std::int64_t>(i * st.N);
        budget.check_depth(2 * static_cast<std::size_t>(n) + 2 * st.N, "bidirectional_cover shift");
        detail::intersect_shift(st, a, x, n, budget);
    }
    detail::finish_shifted(st);
    return st;
}

using ShiftGenerator = std::function<std::optional<std::int64_t>()>;

/// Keeps a pulled shift iff it is farther than `span` from 0 and from every kept shift.
inline bool admissible_shift(std::int64_t t, const std::vector<std::int64_t>& kept, std::size_t span) {
    auto far = [span](std::int64_t a, std::int64_t b) {
        auto gap = a > b ? static_cast<std::uint64_t>(a - b) : static_cast<std::uint64_t>(b - a);
        return gap > span;
    };
    if (!far(t, 0)) return false;
    return std::all_of(kept.begin(), kept.end(), [&](std::int64_t u) { return far(t, u); });
}

/// Pulls until `count` admissible shifts are kept.
inline std::vector<std::int64_t> select_admissible_shifts(const ShiftGenerator& shifts, std::size_t span,
                                                          std::size_t count, std::size_t max_pulls = 1u << 20) {
    std::vector<std::int64_t> kept;
    std::size_t pulls = 0;
    while (kept.size() < count) {
        if (pulls++ >= max_pulls) throw BudgetError("shift selection: pull budget exhausted");
        auto t = shifts();
        if (!t) {
            throw PreconditionError("shift generator exhausted after " + std::to_string(kept.size()) + " of " +
                                    std::to_string(count) + " admissible shifts");
        }
        if (admissible_shift(*t, kept, span)) kept.push_back(*t);
    }
    return kept;
}

/// As bidirectional_cover, with the shifts drawn from an enumerable family.
inline ShiftedCoverStage enumerable_shift_cover(const ClopenSet& a, const Rational& r, const Rational& s,
                                                const ShiftGenerator& shifts, const BiAssignment& x,
                                                std::optional<Rational> epsilon = std::nullopt,
                                                const Budget& budget = {}, std::size_t max_pulls = 1u << 20) {
    auto setup = detail::shifted_cover_setup(a, r, s, x, epsilon, budget, "enumerable_shift_cover");
    ShiftedCoverStage st;
    st.bound = setup.bound;
    st.epsilon = setup.eps;
    st.k = setup.k;
    st.set = setup.interval;
    st.measure = measure(st.set);
    if (a.empty()) {
        st.set = {};
        st.measure = 0;
        st.verified = true;
        return st;
    }
    const std::size_t span = assignment_span(x);
    std::size_t pulls = 0;
    while (st.k_used < st.k && st.measure > st.bound) {
        if (pulls++ >= max_pulls) throw BudgetError("enumerable_shift_cover: pull budget exhausted");
        auto t = shifts();
        if (!t) {
            throw PreconditionError("enumerable_shift_cover: shift generator exhausted after " +
                                    std::to_string(st.k_used) + " admissible shifts; lemma bound needs " +
                                    std::to_string(st.k));
        }
        if (!admissible_shift(*t, st.shifts, span)) continue;
        budget.check_depth(2 * static_cast<std::size_t>(std::llabs(*t)) + 2 * span + 2, "enumerable_shift_cover");
        detail::intersect_shift(st, a, x, *t, budget);
    }
    detail::finish_shifted(st);
    return st;
}

namespace detail {

template <typename StageFn>
CoverCertificate shifted_iterate(const char* construction, const ClopenSet& a, const Rational& r,
                                 const Rational& s, std::size_t k, const Budget& budget, StageFn stage_for) {
    const auto m = MeasureSpec::uniform();
    CoverCertificate cert;
    cert.construction = construction;
    cert.params.r = r;
    cert.params.s = s;
    cert.params.k = k;
    cert.params.a = a;
    bool identities = true;
    cert.stages = iterate_stages(a, r, s, k, m, budget, [&](const Word& w) {
        ShiftedCoverStage st = stage_for(unembed_word(w));
        identities = identities && st.verified;
        cert.identity_checks.insert(cert.identity_checks.end(), st.checks.begin(), st.checks.end());
        return st.set;
    });
    cert.verified = identities && stages_within_bounds(cert.stages);
    return cert;
}

inline CoverCertificate single_interval_certificate(std::string construction, const ClopenSet& a,
                                                    const Rational& r, const Rational& s, const BiAssignment& x,
                                                    const ShiftedCoverStage& st) {
    CoverCertificate cert;
    cert.construction = std::move(construction);
    cert.params.r = r;
    cert.params.s = s;
    cert.params.a = a;
    cert.params.x = describe_assignment(x);
    cert.params.k = st.k;
    cert.params.k_used = st.k_used;
    cert.params.epsilon = st.epsilon;
    if (st.N != 0) cert.params.N = st.N;
    cert.params.shifts = st.shifts;
    const auto interval = embed_bidirectional(x);
    cert.stages.push_back(make_stage(interval, measure(interval), MeasureSpec::uniform()));
    cert.stages.push_back({st.set, st.measure, st.bound});
    cert.identity_checks = st.checks;
    cert.verified = st.verified && stages_within_bounds(cert.stages);
    return cert;
}

} // namespace detail

inline CoverCertificate bidirectional_certificate(const ClopenSet& a, const Rational& r, const Rational& s,
                                                  const BiAssignment& x, std::optional<Rational> epsilon = std::nullopt,
                                                  const Budget& budget = {}) {
    auto st = bidirectional_cover(a, r, s, x, epsilon, budget);
    return detail::single_interval_certificate("bidirectional", a, r, s, x, st);
}

inline CoverCertificate bidirectional_iterate(const ClopenSet& a, const Rational& r, const Rational& s, std::size_t k,
                                              std::optional<Rational> epsilon = std::nullopt,
                                              const Budget& budget = {}) {
    return detail::shifted_iterate("bidirectional", a, r, s, k, budget, [&](const BiAssignment& x) {
        return bidirectional_cover(a, r, s, x, epsilon, budget);
    });
}

/// The generator is restarted for every interval.
inline CoverCertificate enumerable_shift_certificate(const ClopenSet& a, const Rational& r, const Rational& s,
                                                     const std::function<ShiftGenerator()>& shifts,
                                                     const BiAssignment& x,
                                                     std::optional<Rational> epsilon = std::nullopt,
                                                     const Budget& budget = {}) {
    auto st = enumerable_shift_cover(a, r, s, shifts(), x, epsilon, budget);
    return detail::single_interval_certificate("enum-shift", a, r, s, x, st);
}

inline CoverCertificate enumerable_shift_iterate(const ClopenSet& a, const Rational& r, const Rational& s,
                                                 std::size_t k, const std::function<ShiftGenerator()>& shifts,
                                                 std::optional<Rational> epsilon = std::nullopt,
                                                 const Budget& budget = {}) {
    return detail::shifted_iterate("enum-shift", a, r, s, k, budget, [&](const BiAssignment& x) {
        return enumerable_shift_cover(a, r, s, shifts(), x, epsilon, budget);
    });
}

// ---------------------------------------------------------------------------
// General ergodic transformations

/// ‖a_n − mu(I)‖₂² where a_n = (χ_0 + … + χ_n)/(n+1) and χ_i indicates T^-i(xΩ).
///
/// Uses mu(T^-i(I) ∩ T^-j(I)) = mu(I ∩ T^-(j-i)(I)), valid for measure-preserving T.
inline Rational l2_average_distance(const TransformSpec& t, const Word& x, std::size_t n,
                                    const MeasureSpec& m = MeasureSpec::uniform(), const Budget& budget = {}) {
    const ClopenSet interval{x};
    const Rational c = measure(interval, m);
    const Rational count = Rational(n + 1);
    Rational first_moment = 0;   // Σ_i mu(B_i)
    Rational second_moment = 0;  // Σ_{i,j} mu(B_i ∩ B_j)
    ClopenSet current = interval;
    for (std::size_t d = 0; d <= n; ++d) {
        if (d > 0) current = preimage_clopen(t, current, budget);
        budget.check_depth(current.max_depth(), "l2_average_distance refinement");
        Rational mu = measure(current, m);
        first_moment += mu;
        if (d == 0) {
            second_moment += count * mu;
        } else {
            second_moment += 2 * Rational(n + 1 - d) * measure(intersect(interval, current), m);
        }
    }
    const Rational mean = first_moment / count;
    return second_moment / (count * count) - 2 * c * mean + c * c;
}

struct ErgodicOptions {
    std::size_t n_budget = std::size_t{1} << 12;
    std::size_t sqrt_bits = 16;
    bool check_preservation = true;
    std::size_t preservation_depth = 8;
    Budget budget;
};

struct ErgodicStage {
    ClopenSet set;
    Rational measure;
    Rational bound;
    std::size_t n = 0;
    std::string certified_by;            // "cauchy-schwarz" or "exact-cover"
    std::optional<Rational> l2;
    std::optional<Rational> cauchy_schwarz_bound;  // mu(a)mu(I) + sqrt_upper(l2)
    bool verified = false;
};

/// I ∩ ⋂_{i <= n} T^-i(a), built as I ∩ D_n with D_0 = a, D_{j+1} = a ∩ T^-1(D_j).
inline ClopenSet ergodic_intersection(const TransformSpec& t, const ClopenSet& a, const Word& x, std::size_t n,
                                      const Budget& budget = {}) {
    ClopenSet core = a;
    for (std::size_t j = 0; j < n && !core.empty(); ++j) {
        core = intersect(a, preimage_clopen(t, core, budget));
    }
    return intersect(ClopenSet{x}, core);
}

namespace detail {

inline void require_ergodic_preconditions(const TransformSpec& t, const ClopenSet& a, const Rational& r,
                                          const MeasureSpec& m, std::size_t depth, bool check) {
    (void)t.exact();
    require_fraction_below_one(r, "ergodic_cover");
    Rational mu = measure(a, m);
    if (!(mu < r)) {
        throw PreconditionError("ergodic_cover: measure(a) = " + to_string(mu) + " must be < r = " + to_string(r));
    }
    if (check) {
        auto report = check_measure_preserving(t, depth, m);
        if (!report.passed()) {
            const auto& v = report.violations.front();
            throw PreconditionError("ergodic_cover: " + t.name() + " is not measure preserving at cylinder '" +
                                    v.cylinder.str() + "' (" + to_string(v.actual) + " != " + to_string(v.expected) +
                                    ")");
        }
    }
}

} // namespace detail

/// Searches n = 1, 2, 4, … for an n certifying mu(I ∩ ⋂_{i<=n} T^-i(a)) <= r·mu(I).
///
/// The primary test is mu(a)mu(I) + sqrt_upper(‖a_n − mu(I)‖²) < r·mu(I). Once
/// the L2 expansion exceeds the budget, the exact measure of the intersection
/// itself is tested for n = 1, 2, 3, … instead.
inline ErgodicStage ergodic_cover(const TransformSpec& t, const ClopenSet& a, const Rational& r, const Word& x,
                                  const MeasureSpec& m = MeasureSpec::uniform(), const ErgodicOptions& opts = {}) {
    const std::size_t depth = std::min(std::max(x.size(), a.max_depth()), opts.preservation_depth);
    detail::require_ergodic_preconditions(t, a, r, m, depth, opts.check_preservation);
    const Rational mu_a = measure(a, m);
    const Rational mu_i = m.cylinder(x);
    ErgodicStage st;
    st.bound = r * mu_i;
    std::optional<Rational> best_cs;
    std::optional<Rational> best_exact;
    const ClopenSet interval{x};
    ClopenSet core = a;         // D_j = a ∩ T^-1(D_{j-1}), so I ∩ D_j is the cover for n = j
    std::size_t core_n = 0;
    bool exact_scan = false;
    for (std::size_t n = 1; n <= opts.n_budget && st.certified_by.empty(); n *= 2) {
        if (!exact_scan) {
            try {
                Rational l2 = l2_average_distance(t, x, n, m, opts.budget);
                Rational cs = mu_a * mu_i + sqrt_upper(l2, opts.sqrt_bits);
                if (!best_cs || cs < *best_cs) best_cs = cs;
                if (cs < st.bound) {
                    st.n = n;
                    st.l2 = l2;
                    st.cauchy_schwarz_bound = cs;
                    st.certified_by = "cauchy-schwarz";
                    break;
                }
                continue;
            } catch (const BudgetError&) {
                exact_scan = true;
            }
        }
        // Without the L2 route, test the exact cover for every n up to the current one.
        try {
            while (core_n < n) {
                core = intersect(a, preimage_clopen(t, core, opts.budget));
                ++core_n;
                Rational mu = measure(intersect(interval, core), m);
                if (!best_exact || mu < *best_exact) best_exact = mu;
                if (mu <= st.bound) {
                    st.n = core_n;
                    st.certified_by = "exact-cover";
                    break;
                }
            }
        } catch (const BudgetError&) {
            break;
        }
    }
    if (st.certified_by.empty()) {
        std::string msg = "ergodic_cover: no n <= " + std::to_string(opts.n_budget) + " certifies r·mu(I) = " +
                          to_string(st.bound) + " for x = '" + x.str() + "' within the budget";
        if (best_cs) msg += "; best Cauchy-Schwarz bound " + to_string(*best_cs) + " (" +
                            std::to_string(to_double(*best_cs / mu_i)) + " of mu(I))";
        if (best_exact) msg += "; best exact cover " + to_string(*best_exact);
        msg += "; the transform may be non-ergodic or slowly mixing, or r too tight";
        throw BudgetError(msg);
    }
    st.set = ergodic_intersection(t, a, x, st.n, opts.budget);
    st.measure = measure(st.set, m);
    st.verified = st.measure <= st.bound;
    return st;
}

inline CoverCertificate ergodic_certificate(const TransformSpec& t, const ClopenSet& a, const Rational& r,
                                            const Word& x, const MeasureSpec& m = MeasureSpec::uniform(),
                                            const ErgodicOptions& opts = {}) {
    auto st = ergodic_cover(t, a, r, x, m, opts);
    CoverCertificate cert;
    cert.construction = "ergodic";
    cert.measure = m;
    cert.params.r = r;
    cert.params.a = a;
    cert.params.x = x.str();
    cert.params.n = st.n;
    cert.params.transform = t.name();
    cert.params.certified_by = st.certified_by;
    const ClopenSet interval{x};
    cert.stages.push_back(detail::make_stage(interval, measure(interval, m), m));
    cert.stages.push_back({st.set, st.measure, st.bound});
    cert.verified = st.verified && detail::stages_within_bounds(cert.stages);
    return cert;
}

/// Stage j+1 applies ergodic_cover to every word of stage j; bounds r^(j+1).
inline CoverCertificate ergodic_cover_iterate(const TransformSpec& t, const ClopenSet& a, const Rational& r,
                                              std::size_t k, const MeasureSpec& m = MeasureSpec::uniform(),
                                              ErgodicOptions opts = {}) {
    detail::require_ergodic_preconditions(t, a, r, m, std::min(a.max_depth(), opts.preservation_depth),
                                          opts.check_preservation);
    opts.check_preservation = false;
    CoverCertificate cert;
    cert.construction = "ergodic";
    cert.measure = m;
    cert.params.r = r;
    cert.params.k = k;
    cert.params.a = a;
    cert.params.transform = t.name();
    std::size_t max_n = 0;
    bool all_cs = true;
    cert.stages = detail::iterate_stages(a, r, r, k, m, opts.budget, [&](const Word& x) {
        auto st = ergodic_cover(t, a, r, x, m, opts);
        max_n = std::max(max_n, st.n);
        all_cs = all_cs && st.certified_by == "cauchy-schwarz";
        return st.set;
    });
    if (k > 0) {
        cert.params.n = max_n;
        cert.params.certified_by = all_cs ? "cauchy-schwarz" : "mixed";
    }
    cert.verified = detail::stages_within_bounds(cert.stages);
    return cert;
}

// ---------------------------------------------------------------------------
// Enumerated inputs

/// Runs a clopen construction on the fuel-bounded prefix of an enumerated open
/// set, using its asserted measure bound as r. The result is labeled "assumed".
template <typename Build>
CoverCertificate assume_enumerated(const EffOpen& a, std::size_t fuel, Build build) {
    if (!a.assumed_measure_upper()) {
        throw PreconditionError("enumerated open set '" + a.name() + "' needs an asserted measure upper bound");
    }
    const Rational& r = *a.assumed_measure_upper();
    auto view = eff_open_prefix(a, fuel);
    if (view.measure > r) {
        throw PreconditionError("asserted bound " + to_string(r) + " contradicted: fuel-" + std::to_string(fuel) +
                                " prefix already has measure " + to_string(view.measure));
    }
    CoverCertificate cert = build(view.set, r);
    cert.mode = "assumed";
    cert.verified = false;
    cert.params.fuel = fuel;
    return cert;
}

} // namespace effergo
