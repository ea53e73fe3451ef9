#include <gtest/gtest.h>

#include "effergo/effergo.hpp"
#include "oracles.hpp"

using namespace effergo;
using namespace effergo::literals;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

Point zeros() { return Point::periodic(""_w, "0"_w); }

// Orbit of a prefix under a reference forward map, membership by plain prefix matching.
std::vector<std::size_t> oracle_counts(const std::string& name, const std::vector<Word>& u, std::string bits,
                                       std::size_t depth, std::size_t n) {
    std::vector<std::size_t> counts;
    std::size_t c = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) bits = name == "shift" ? oracle::shift(bits) : oracle::odometer(bits);
        c += oracle::member(u, bits.substr(0, std::min(depth, bits.size()))) ? 1 : 0;
        counts.push_back(c);
    }
    return counts;
}

} // namespace

TEST(Trace, Examples) {
    EXPECT_EQ(frequency_trace(odometer_transform(), ClopenSet{"1"_w}, zeros(), 8).last(), q(1, 2));
    EXPECT_EQ(frequency_trace(shift_transform(), ClopenSet{"1"_w}, Point::periodic(""_w, "10"_w), 6).g(6), q(1, 2));
    auto all = frequency_trace(shift_transform(), ClopenSet::full(), Point::seeded(5), 20);
    for (std::size_t m = 1; m <= 20; ++m) EXPECT_EQ(all.g(m), 1);
    EXPECT_THROW(frequency_trace(shift_transform(), ClopenSet::full(), zeros(), 0), PreconditionError);
}

TEST(Trace, RowsDescribeTheOrbit) {
    auto tr = frequency_trace(odometer_transform(), ClopenSet{"1"_w}, zeros(), 4);
    EXPECT_EQ(tr.orbit_prefixes, (std::vector<Word>{"0"_w, "1"_w, "0"_w, "1"_w}));
    EXPECT_EQ(tr.in_set, (std::vector<bool>{false, true, false, true}));
}

TEST(Trace, RejectsApproximableTransforms) {
    EXPECT_ANY_THROW(frequency_trace(rotation_transform(ComputableReal::sqrt2_minus_1()), ClopenSet{"0"_w}, zeros(), 4));
}

TEST(Trace, CountsMatchReferenceOrbits) {
    oracle::Gen gen(21);
    for (int trial = 0; trial < 60; ++trial) {
        auto words = gen.words(4, 4);
        ClopenSet u = normalize(words);
        const std::size_t depth = 4;
        const std::size_t n = 40;
        Point p = Point::seeded(gen.rng());
        for (std::string name : {"shift", "odometer"}) {
            auto t = name == "shift" ? shift_transform() : odometer_transform();
            auto tr = frequency_trace(t, u, p, n);
            std::string bits = p.prefix_of(name == "shift" ? n + depth : depth).str();
            EXPECT_EQ(tr.counts, oracle_counts(name, words, bits, depth, n)) << name;
        }
    }
}

TEST(Trace, CountsIncreaseByAtMostOne) {
    oracle::Gen gen(22);
    for (int trial = 0; trial < 40; ++trial) {
        ClopenSet u = normalize(gen.words(4, 3));
        auto tr = frequency_trace(shift_transform(), u, Point::seeded(gen.rng()), 100);
        for (std::size_t m = 1; m < tr.length(); ++m) {
            Rational step = tr.g(m + 1) * Rational(m + 1) - tr.g(m) * Rational(m);
            EXPECT_TRUE(step == 0 || step == 1);
        }
    }
}

TEST(Trace, SubsetCountsNeverExceedTheSet) {
    oracle::Gen gen(23);
    for (int trial = 0; trial < 40; ++trial) {
        ClopenSet u = normalize(gen.words(5, 4));
        ClopenSet inner = intersect(u, normalize(gen.words(5, 4)));
        Point p = Point::seeded(gen.rng());
        auto a = frequency_trace(shift_transform(), inner, p, 64);
        auto b = frequency_trace(shift_transform(), u, p, 64);
        for (std::size_t m = 1; m <= 64; ++m) EXPECT_LE(a.g(m), b.g(m));
    }
}

TEST(Trace, OdometerVisitsEveryCylinderAtItsExactRate) {
    for (std::size_t len = 0; len <= 4; ++len) {
        for_each_word(len, [&](const Word& w) {
            const std::size_t period = std::size_t{1} << len;
            auto tr = frequency_trace(odometer_transform(), ClopenSet{w}, zeros(), period * 16);
            for (std::size_t j = 1; j <= 16; ++j) EXPECT_EQ(tr.g(period * j), dyadic(len)) << w.str();
        });
    }
}

// ---------------------------------------------------------------------------

TEST(Exceed, Examples) {
    auto one = gn_exceed_set(shift_transform(), ClopenSet{"1"_w}, q(1, 2), 1, 1);
    EXPECT_EQ(one.set, ClopenSet{"1"_w});
    EXPECT_EQ(one.measure, q(1, 2));
    auto two = gn_exceed_set(shift_transform(), ClopenSet{"1"_w}, q(3, 4), 2, 2);
    EXPECT_EQ(two.set, ClopenSet{"11"_w});
    EXPECT_EQ(two.measure, q(1, 4));
    EXPECT_TRUE(gn_exceed_set(shift_transform(), ClopenSet{}, q(0), 1, 4).set.empty());
    EXPECT_THROW(gn_exceed_set(shift_transform(), ClopenSet{"1"_w}, q(1, 2), 3, 2), PreconditionError);
}

TEST(Exceed, MatchesBruteForceCounts) {
    oracle::Gen gen(24);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t L = 1 + gen.below(2);
        auto words = gen.words(3, L);
        ClopenSet u = normalize(words);
        Rational r = q(static_cast<std::int64_t>(gen.below(8)), 8);
        const std::size_t n_max = 1 + gen.below(6);
        const std::size_t N = 1 + gen.below(n_max);
        for (std::string name : {"shift", "odometer"}) {
            auto t = name == "shift" ? shift_transform() : odometer_transform();
            const std::size_t depth = name == "shift" ? n_max + L - 1 : L;
            auto got = gn_exceed_set(t, u, r, N, n_max);
            auto table = oracle::Table::of(got.set.words(), depth);
            std::size_t count = 0;
            for (std::size_t code = 0; code < table.in.size(); ++code) {
                auto counts = oracle_counts(name, words, table.bits(code), L, n_max);
                bool expected = false;
                for (std::size_t n = N; n <= n_max; ++n) expected = expected || Rational(counts[n - 1]) > r * Rational(n);
                ASSERT_EQ(table.in[code] != 0, expected) << name << " " << table.bits(code);
                count += expected ? 1 : 0;
            }
            EXPECT_EQ(got.measure, Rational(count) / Rational(table.in.size()));
        }
    }
}

TEST(Exceed, MonotoneInTheWindow) {
    ClopenSet u{"1"_w, "01"_w};
    Rational prev = 0;
    for (std::size_t n_max = 1; n_max <= 6; ++n_max) {
        Rational mu = gn_exceed_set(shift_transform(), u, q(3, 4), 1, n_max).measure;
        EXPECT_GE(mu, prev);
        prev = mu;
    }
    prev = 1;
    for (std::size_t N = 1; N <= 6; ++N) {
        Rational mu = gn_exceed_set(shift_transform(), u, q(3, 4), N, 6).measure;
        EXPECT_LE(mu, prev);
        prev = mu;
    }
}

// ---------------------------------------------------------------------------

TEST(Experiment, OdometerExample) {
    auto rep = birkhoff_experiment(odometer_transform(), ClopenSet{"11"_w}, {zeros()}, 64);
    EXPECT_EQ(rep.points.at(0).g, q(1, 4));
    EXPECT_EQ(rep.points.at(0).deviation, 0);
    EXPECT_FALSE(rep.points.at(0).seeded);
    EXPECT_EQ(rep.seeded, 0u);
}

TEST(Experiment, WholeSpaceHasNoDeviation) {
    std::vector<Point> pts{Point::seeded(1), Point::seeded(2), Point::periodic("1"_w, "0"_w)};
    auto rep = birkhoff_experiment(shift_transform(), ClopenSet::full(), pts, 50);
    for (const auto& p : rep.points) {
        EXPECT_EQ(p.deviation, 0);
        EXPECT_EQ(p.tail_max_deviation, 0);
    }
}

TEST(Experiment, SeededShiftFrequenciesAreNearOneHalf) {
    std::vector<Point> pts;
    for (std::uint64_t s = 1; s <= 16; ++s) pts.push_back(Point::seeded(s));
    auto rep = birkhoff_experiment(shift_transform(), ClopenSet{"1"_w}, pts, 1u << 14);
    EXPECT_EQ(rep.seeded, 16u);
    EXPECT_LE(rep.mean_abs_deviation, 0.02);
    EXPECT_LE(rep.max_abs_deviation, 0.04);
    EXPECT_TRUE(rep.within_tolerance);
}

TEST(Experiment, ApproximableTargetReportsBothSides) {
    auto x = ApproximableSet::below(ComputableReal::sqrt2_minus_1());
    auto rep = birkhoff_experiment(shift_transform(), x, 8, {Point::seeded(3)}, 1u << 12);
    ASSERT_TRUE(rep.points.at(0).g_high.has_value());
    EXPECT_LE(rep.points.at(0).g, *rep.points.at(0).g_high);
    EXPECT_LE(rep.mu_high - rep.mu_low, dyadic(8));
}

// ---------------------------------------------------------------------------

TEST(Approximable, SandwichGapShrinksWithPrecision) {
    auto x = ApproximableSet::below(ComputableReal::sqrt2_minus_1());
    for (std::size_t p = 1; p <= 20; ++p) {
        ClopenSet in = x.inner(p), out = x.outer(p);
        EXPECT_TRUE(is_subset(in, out));
        EXPECT_LE(measure(out) - measure(in), dyadic(p));
        EXPECT_LT(measure(in), make_rational(41422, 100000));
        EXPECT_GT(measure(out), make_rational(41421, 100000));
    }
}

TEST(Approximable, FrequencyExamples) {
    auto exact = ApproximableSet::exact(ClopenSet{"0"_w});
    auto f = approximable_frequency(exact, 4, shift_transform(), Point::seeded(9), 100);
    EXPECT_EQ(f.low, f.high);

    auto x = ApproximableSet::below(ComputableReal::sqrt2_minus_1());
    auto one = approximable_frequency(x, 8, shift_transform(), Point::seeded(9), 1);
    EXPECT_TRUE(one.low == 0 || one.low == 1);
    EXPECT_TRUE(one.high == 0 || one.high == 1);

    auto big = approximable_frequency(x, 8, shift_transform(), Point::seeded(9), 1u << 14);
    EXPECT_LE(big.low, big.high);
    EXPECT_LE(to_double(big.high - big.low), 0.02);
    EXPECT_NEAR(to_double(big.high), to_double(big.outer_measure), 0.03);
}

// ---------------------------------------------------------------------------

TEST(Integrands, IntegralExamples) {
    EXPECT_EQ(integral(basic_function({{q(1), ""_w}})), 1);
    EXPECT_EQ(integral(basic_function({{q(2), "0"_w}, {q(1), "10"_w}})), q(5, 4));
    EXPECT_EQ(integral(basic_function({})), 0);
    EXPECT_EQ(integral(basic_function({{q(1), "1"_w}}), MeasureSpec::bernoulli(q(1, 3))), q(1, 3));
    EXPECT_THROW(basic_function({{q(-1), "0"_w}}), PreconditionError);
}

TEST(Integrands, IntegralMatchesCylinderSums) {
    oracle::Gen gen(25);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<Rational, Word>> terms;
        std::size_t n = gen.below(5);
        for (std::size_t i = 0; i < n; ++i) terms.emplace_back(q(static_cast<std::int64_t>(gen.below(5)), 3), gen.word(4));
        auto f = basic_function(terms);
        Rational expected = 0;
        const std::size_t depth = 4;
        for_each_word(depth, [&](const Word& w) { expected += f.evaluate(w) * dyadic(depth); });
        EXPECT_EQ(integral(f), expected);
    }
}

TEST(Integrands, LscAverageExamples) {
    auto ind1 = LscFunction::staged({basic_function({{q(1), "1"_w}})});
    EXPECT_EQ(lsc_average(ind1, 0, odometer_transform(), zeros(), 8), q(1, 2));
    auto one = LscFunction::staged({basic_function({{q(1), ""_w}})});
    EXPECT_EQ(lsc_average(one, 0, shift_transform(), Point::seeded(3), 17), 1);
}

TEST(Integrands, StagesAreMonotone) {
    auto f = LscFunction::staged({basic_function({{q(1), "1"_w}}), basic_function({{q(1), "1"_w}, {q(1), "01"_w}})});
    EXPECT_FALSE(check_lsc_monotone(f, 2));
    oracle::Gen gen(26);
    for (int trial = 0; trial < 20; ++trial) {
        Point p = Point::seeded(gen.rng());
        EXPECT_LE(lsc_average(f, 0, shift_transform(), p, 200), lsc_average(f, 1, shift_transform(), p, 200));
    }
    auto bad = LscFunction::staged({basic_function({{q(1), "1"_w}}), basic_function({{q(1), "0"_w}})});
    auto v = check_lsc_monotone(bad, 2);
    ASSERT_TRUE(v);
    EXPECT_EQ(v->cylinder, "1"_w);
}

TEST(Integrands, LeadingRunStagesIncreaseTowardsTheirIntegral) {
    auto f = LscFunction::leading_run();
    EXPECT_FALSE(check_lsc_monotone(f, 8));
    Rational prev = 0;
    for (std::size_t m = 0; m < 10; ++m) {
        Rational i = integral(f.stage(m));
        EXPECT_GE(i, prev);
        EXPECT_LT(i, 1);  // Σ_j 2^-j
        prev = i;
        Point p = Point::seeded(m + 1);
        EXPECT_LE(lsc_average(f, m, shift_transform(), p, 300), lsc_average(f, m + 1, shift_transform(), p, 300));
    }
}
