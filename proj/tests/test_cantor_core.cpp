#include <gtest/gtest.h>

#include "effergo/effergo.hpp"
#include "oracles.hpp"

using namespace effergo;
using namespace effergo::literals;

namespace {

ClopenSet set_of(std::vector<Word> words) { return normalize(std::move(words)); }

} // namespace

TEST(Word, RejectsNonBinaryCharacters) {
    EXPECT_THROW(Word("012"), SchemaError);
    EXPECT_NO_THROW(Word(""));
}

TEST(Word, OrdersByLengthThenBits) {
    EXPECT_LT("1"_w, "00"_w);
    EXPECT_LT("00"_w, "01"_w);
    EXPECT_TRUE("01"_w.is_prefix_of("011"_w));
    EXPECT_FALSE("011"_w.is_prefix_of("01"_w));
}

TEST(Rational, ParsesAndPrints) {
    EXPECT_EQ(parse_rational("3/6"), make_rational(1, 2));
    EXPECT_EQ(to_string(make_rational(2)), "2/1");
    EXPECT_THROW(parse_rational("1/0"), SchemaError);
    EXPECT_THROW(parse_rational("x"), SchemaError);
}

TEST(Rational, SqrtUpperIsAnUpperBound) {
    for (int n = 0; n < 50; ++n) {
        Rational x = make_rational(n, 37);
        Rational s = sqrt_upper(x, 16);
        EXPECT_GE(s * s, x);
        EXPECT_LE(s - dyadic(15), s);
    }
    EXPECT_EQ(sqrt_upper(make_rational(1, 4)), make_rational(1, 2));
}

TEST(Clopen, NormalizeAbsorbsExtensions) { EXPECT_EQ(set_of({"0"_w, "01"_w}).words(), std::vector<Word>{"0"_w}); }

TEST(Clopen, NormalizeMergesSiblings) { EXPECT_TRUE(set_of({"0"_w, "1"_w}).is_full()); }

TEST(Clopen, NormalizeOfNothingIsEmpty) { EXPECT_TRUE(set_of({}).empty()); }

TEST(Clopen, NormalizeMergesRecursively) {
    EXPECT_EQ(set_of({"00"_w, "01"_w, "10"_w}).words(), (std::vector<Word>{"0"_w, "10"_w}));
    EXPECT_TRUE(set_of({"00"_w, "01"_w, "1"_w}).is_full());
}

TEST(Clopen, DecideNeedsLongEnoughPrefix) {
    ClopenSet s{"01"_w};
    EXPECT_FALSE(s.decide("0"_w).has_value());
    EXPECT_EQ(s.decide("01"_w), true);
    EXPECT_EQ(s.decide("1"_w), false);
}

TEST(Measure, UniformCylinders) {
    EXPECT_EQ(measure(ClopenSet{"0"_w, "10"_w}), make_rational(3, 4));
    EXPECT_EQ(measure(ClopenSet::full()), 1);
    EXPECT_EQ(measure(ClopenSet{}), 0);
}

TEST(Measure, BernoulliCountsOnes) {
    auto m = MeasureSpec::bernoulli(make_rational(1, 3));
    EXPECT_EQ(measure(ClopenSet{"0"_w}, m), make_rational(2, 3));
    EXPECT_EQ(measure(ClopenSet{"1"_w, "01"_w}, m), make_rational(1, 3) + make_rational(2, 9));
    EXPECT_THROW(MeasureSpec::bernoulli(1), PreconditionError);
}

TEST(Measure, MarkovFollowsTransitions) {
    Rational h = make_rational(1, 2);
    auto m = MeasureSpec::markov({h, h}, {{{make_rational(1, 4), make_rational(3, 4)}, {h, h}}});
    EXPECT_EQ(m.cylinder("01"_w), make_rational(3, 8));
    EXPECT_EQ(measure(ClopenSet::full(), m), 1);
    EXPECT_THROW(MeasureSpec::markov({h, h}, {{{h, h}, {h, h + h}}}), PreconditionError);
}

TEST(Sections, ShiftSectionDropsPrefix) {
    EXPECT_EQ(shift_section("1"_w, ClopenSet{"0"_w, "10"_w}).words(), std::vector<Word>{"0"_w});
    EXPECT_TRUE(shift_section("0"_w, ClopenSet{"0"_w, "10"_w}).is_full());
    EXPECT_TRUE(shift_section("11"_w, ClopenSet{"0"_w, "10"_w}).empty());
}

TEST(Sections, ExpandToDepthRejectsShallowTargets) {
    EXPECT_THROW(expand_to_depth(ClopenSet{"01"_w}, 1), PreconditionError);
    EXPECT_EQ(expand_to_depth(ClopenSet{"0"_w}, 2), (std::vector<Word>{"00"_w, "01"_w}));
}

// Properties against the table oracle on random inputs.

class CantorProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(CantorProperties, NormalizationIsIdempotentAndMeasurePreserving) {
    oracle::Gen gen(GetParam());
    for (int trial = 0; trial < 200; ++trial) {
        auto words = gen.words(8, 6);
        ClopenSet s = normalize(words);
        EXPECT_TRUE(ClopenSet::is_canonical(s.words()));
        EXPECT_EQ(normalize(s.words()), s);
        EXPECT_EQ(measure(s), oracle::measure(words));
    }
}

TEST_P(CantorProperties, BooleanOperationsMatchTables) {
    oracle::Gen gen(GetParam() + 1000);
    for (int trial = 0; trial < 200; ++trial) {
        auto wa = gen.words(6, 5);
        auto wb = gen.words(6, 5);
        ClopenSet a = normalize(wa), b = normalize(wb);
        auto ta = oracle::Table::of(wa, 5), tb = oracle::Table::of(wb, 5);
        auto check = [&](const ClopenSet& got, auto op) {
            auto tg = oracle::Table::of(got.words(), 5);
            for (std::size_t c = 0; c < ta.in.size(); ++c) ASSERT_EQ(tg.in[c] != 0, op(ta.in[c] != 0, tb.in[c] != 0));
        };
        check(set_union(a, b), [](bool x, bool y) { return x || y; });
        check(intersect(a, b), [](bool x, bool y) { return x && y; });
        check(difference(a, b), [](bool x, bool y) { return x && !y; });
        check(complement(a), [](bool x, bool) { return !x; });
        EXPECT_EQ(measure(set_union(a, b)) + measure(intersect(a, b)), measure(a) + measure(b));
        EXPECT_EQ(is_subset(intersect(a, b), a), true);
    }
}

TEST_P(CantorProperties, MeasureIsAdditiveOverDisjointUnionsForEveryMeasure) {
    oracle::Gen gen(GetParam() + 2000);
    Rational h = make_rational(1, 2);
    std::vector<MeasureSpec> specs{MeasureSpec::uniform(), MeasureSpec::bernoulli(make_rational(2, 7)),
                                   MeasureSpec::markov({make_rational(1, 3), make_rational(2, 3)},
                                                       {{{h, h}, {make_rational(1, 5), make_rational(4, 5)}}})};
    for (int trial = 0; trial < 100; ++trial) {
        ClopenSet a = normalize(gen.words(6, 5));
        ClopenSet b = normalize(gen.words(6, 5));
        for (const auto& m : specs) {
            EXPECT_EQ(measure(a, m), measure(intersect(a, b), m) + measure(difference(a, b), m));
            EXPECT_EQ(measure(a, m) + measure(complement(a), m), 1);
        }
    }
}

TEST_P(CantorProperties, SectionsAverageToTheMeasure) {
    oracle::Gen gen(GetParam() + 3000);
    for (int trial = 0; trial < 100; ++trial) {
        ClopenSet a = normalize(gen.words(6, 5));
        for (std::size_t len = 0; len <= 3; ++len) {
            Rational total = 0;
            for_each_word(len, [&](const Word& y) { total += measure(shift_section(y, a)); });
            EXPECT_EQ(total / Rational(effergo::Integer(1) << len), measure(a));
        }
    }
}

TEST_P(CantorProperties, CommonSectionIsTheIntersectionOfSections) {
    oracle::Gen gen(GetParam() + 4000);
    for (int trial = 0; trial < 100; ++trial) {
        ClopenSet a = normalize(gen.words(6, 5));
        for (std::size_t len = 0; len <= 3; ++len) {
            ClopenSet expected = ClopenSet::full();
            for_each_word(len, [&](const Word& y) { expected = intersect(expected, shift_section(y, a)); });
            EXPECT_EQ(common_section(a, len), expected);
        }
    }
}

TEST_P(CantorProperties, ContainsPointAgreesWithPrefixMembership) {
    oracle::Gen gen(GetParam() + 5000);
    for (int trial = 0; trial < 100; ++trial) {
        auto words = gen.words(6, 6);
        ClopenSet s = normalize(words);
        Point p = Point::seeded(gen.rng());
        EXPECT_EQ(contains_point(s, p), oracle::member(words, p.prefix_of(8).str()));
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CantorProperties, ::testing::Values(1u, 2u, 3u, 4u));

TEST(Points, PeriodicAndExplicitPrefixes) {
    EXPECT_EQ(Point::periodic("1"_w, "01"_w).prefix_of(6), "101010"_w);
    EXPECT_EQ(Point::explicit_fill("10"_w, 1).prefix_of(5), "10111"_w);
    EXPECT_THROW(Point::periodic(""_w, ""_w), PreconditionError);
}

TEST(Points, SeededPrefixesAreConsistent) {
    Point p = Point::seeded(42);
    EXPECT_TRUE(p.prefix_of(70).is_prefix_of(p.prefix_of(200)));
    EXPECT_EQ(p.prefix_of(100), Point::seeded(42).prefix_of(100));
    EXPECT_NE(p.prefix_of(100), Point::seeded(43).prefix_of(100));
}

TEST(EffOpenSets, FuelViewsAreMonotone) {
    auto below = EffOpen::below(ComputableReal::sqrt2_minus_1());
    Rational prev = 0;
    for (std::size_t fuel = 0; fuel < 12; ++fuel) {
        auto view = eff_open_prefix(below, fuel);
        EXPECT_GE(view.measure, prev);
        EXPECT_LT(view.measure, make_rational(41422, 100000));
        prev = view.measure;
    }
    EXPECT_GT(prev, make_rational(41, 100));
}

TEST(EffOpenSets, FiniteSetExhausts) {
    auto a = EffOpen::finite(ClopenSet{"0"_w, "11"_w});
    auto view = eff_open_prefix(a, 10);
    EXPECT_TRUE(view.exhausted);
    EXPECT_EQ(view.measure, make_rational(3, 4));
    EXPECT_EQ(covered_at_fuel(a, Point::periodic(""_w, "1"_w), 10), Coverage::yes);
    EXPECT_EQ(covered_at_fuel(a, Point::periodic(""_w, "1"_w), 1), Coverage::unknown);
}

TEST(Reals, EnclosuresNest) {
    auto x = ComputableReal::sqrt2_minus_1();
    for (std::size_t p = 1; p < 40; ++p) {
        auto [lo, hi] = x.enclosure(p);
        auto [lo2, hi2] = x.enclosure(p + 1);
        EXPECT_LE(lo, lo2);
        EXPECT_GE(hi, hi2);
        EXPECT_LT(lo * lo + 2 * lo, 1);  // (x+1)^2 = 2
        EXPECT_GT(hi * hi + 2 * hi, 1);
    }
}
