#include <gtest/gtest.h>

#include "effergo/effergo.hpp"
#include "oracles.hpp"

using namespace effergo;
using namespace effergo::literals;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

// A subset of ({0,1}^2)^2 as a 16-bit mask; cell c = 4·w0 + w1.
ProductClopen from_mask(std::uint32_t mask) {
    std::vector<ProductCylinder> cyl;
    for (unsigned c = 0; c < 16; ++c) {
        if ((mask >> c) & 1u) {
            oracle::Table t{2, {}};
            cyl.push_back({{0, Word(t.bits(c >> 2))}, {1, Word(t.bits(c & 3u))}});
        }
    }
    return ProductClopen(std::move(cyl));
}

unsigned two_bits(const Word& w) { return (w.str()[0] == '1' ? 2u : 0u) + (w.str()[1] == '1' ? 1u : 0u); }

ProductCylinder cyl(std::initializer_list<std::pair<const std::size_t, Word>> c) { return ProductCylinder(c); }

} // namespace

TEST(Product, MeasureExamples) {
    EXPECT_EQ(product_measure(ProductClopen{cyl({{0, "0"_w}})}), q(1, 2));
    EXPECT_EQ(product_measure(ProductClopen{cyl({{0, "0"_w}}), cyl({{1, "0"_w}})}), q(3, 4));
    EXPECT_EQ(product_measure(ProductClopen{}), 0);
    EXPECT_EQ(product_measure(ProductClopen{cyl({{0, "0"_w}}), cyl({{1, "00"_w}})}), q(5, 8));
    EXPECT_TRUE(ProductClopen{cyl({{3, ""_w}})}.is_full());
}

TEST(Product, MeasureMatchesCellCounts) {
    oracle::Gen gen(31);
    for (int trial = 0; trial < 300; ++trial) {
        auto mask = static_cast<std::uint32_t>(gen.below(1u << 16));
        EXPECT_EQ(product_measure(from_mask(mask)), q(std::popcount(mask), 16));
    }
}

TEST(Product, MeasureOfMixedDepthCylindersMatchesInclusionExclusion) {
    oracle::Gen gen(32);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ProductCylinder> cs;
        std::size_t n = gen.below(4);
        for (std::size_t i = 0; i < n; ++i) cs.push_back({{0, gen.word(2)}, {1, gen.word(2)}});
        // Brute force over the 16 cells.
        std::size_t count = 0;
        for (unsigned c = 0; c < 16; ++c) {
            oracle::Table t{2, {}};
            std::string a = t.bits(c >> 2), b = t.bits(c & 3u);
            bool in = false;
            for (const auto& x : cs) {
                in = in || (a.compare(0, x.at(0).size(), x.at(0).str()) == 0 &&
                            b.compare(0, x.at(1).size(), x.at(1).str()) == 0);
            }
            count += in ? 1 : 0;
        }
        EXPECT_EQ(product_measure(ProductClopen(cs)), q(static_cast<std::int64_t>(count), 16));
    }
}

TEST(Sections, Examples) {
    ProductClopen u{cyl({{0, "0"_w}})};
    EXPECT_TRUE(section(u, "0"_w).is_full());
    EXPECT_TRUE(section(u, "1"_w).empty());
    ProductClopen v{cyl({{0, "0"_w}, {1, "1"_w}}), cyl({{0, "1"_w}})};
    EXPECT_EQ(section(v, "0"_w), (ProductClopen{cyl({{0, "1"_w}})}));
    EXPECT_THROW(section(ProductClopen{cyl({{0, "01"_w}})}, "0"_w), PreconditionError);
}

TEST(Sections, AverageToTheMeasure) {
    oracle::Gen gen(33);
    for (int trial = 0; trial < 200; ++trial) {
        ProductClopen u = from_mask(static_cast<std::uint32_t>(gen.below(1u << 16)));
        for (std::size_t d = 2; d <= 4; ++d) {
            Rational total = 0;
            for_each_word(d, [&](const Word& w) { total += product_measure(section(u, w)); });
            EXPECT_EQ(total / Rational(Integer(1) << d), product_measure(u));
        }
    }
}

TEST(Threshold, Examples) {
    ProductClopen u{cyl({{0, "0"_w}})};
    auto v = threshold_set(u, q(2, 3), 1);
    EXPECT_EQ(v, ClopenSet{"0"_w});
    EXPECT_EQ(measure(v), q(1, 2));
    EXPECT_TRUE(threshold_set(ProductClopen{}, q(0), 2).empty());
    EXPECT_THROW(threshold_set(ProductClopen{cyl({{0, "01"_w}})}, q(1, 2), 1), PreconditionError);
}

TEST(Threshold, MarkovBoundOnEverySmallSet) {
    for (std::uint32_t mask = 0; mask < (1u << 16); mask += 7) {
        if (std::popcount(mask) > 8) continue;
        ProductClopen u = from_mask(mask);
        Rational a = q(std::popcount(mask), 16);
        for (Rational t : {q(2, 3), q(3, 4), q(1, 2) + a / 2}) {
            if (t <= a) continue;
            EXPECT_LE(measure(threshold_set(u, t, 2)), a / t);
        }
    }
}

// ---------------------------------------------------------------------------

TEST(Construction, OdometerExample) {
    ProductClopen u{cyl({{0, "0"_w}})};
    auto rep = lambalgen_construct(u, {Point::periodic(""_w, "0"_w)}, odometer_transform(), 4);
    ASSERT_EQ(rep.steps.size(), 1u);
    EXPECT_EQ(rep.steps[0].v, ClopenSet{"0"_w});
    EXPECT_EQ(rep.steps[0].threshold, q(2, 3));
    EXPECT_EQ(rep.indices(), std::vector<std::size_t>{1});
    EXPECT_TRUE(rep.verified);
}

TEST(Construction, EmptySetNeedsNoShift) {
    std::vector<Point> pts{Point::seeded(1), Point::seeded(2), Point::seeded(3)};
    auto rep = lambalgen_construct(ProductClopen{}, pts, shift_transform(), 4);
    EXPECT_EQ(rep.indices(), (std::vector<std::size_t>{0, 0, 0}));
    EXPECT_TRUE(rep.verified);
}

TEST(Construction, Preconditions) {
    ProductClopen heavy{cyl({{0, "0"_w}}), cyl({{1, "00"_w}})};
    std::vector<Point> two{Point::seeded(1), Point::seeded(2)};
    EXPECT_THROW(lambalgen_construct(heavy, two, odometer_transform(), 8), PreconditionError);
    ProductClopen far{cyl({{2, "0"_w}})};
    EXPECT_THROW(lambalgen_construct(far, two, odometer_transform(), 8), PreconditionError);
}

TEST(Construction, TrappedPointIsReported) {
    // The shift fixes 000…, which stays inside V_0 = {"0"} forever.
    ProductClopen u{cyl({{0, "0"_w}})};
    try {
        lambalgen_construct(u, {Point::periodic(""_w, "0"_w)}, shift_transform(), 5);
        FAIL() << "expected a trapped orbit";
    } catch (const TrappedError& e) {
        EXPECT_EQ(e.coordinate(), 0u);
        EXPECT_EQ(e.v_measure(), q(1, 2));
        EXPECT_EQ(e.orbit().size(), 6u);
        for (const auto& w : e.orbit()) EXPECT_EQ(e.v().decide(w), true);
        EXPECT_NE(std::string(e.what()).find("point trapped"), std::string::npos);
    }
}

TEST(Construction, RandomSeededInstancesVerifyIndependently) {
    oracle::Gen gen(34);
    std::size_t built = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto mask = static_cast<std::uint32_t>(gen.below(1u << 16));
        if (std::popcount(mask) > 8) continue;
        ProductClopen u = from_mask(mask);
        std::vector<Point> pts{Point::seeded(gen.rng()), Point::seeded(gen.rng())};
        auto rep = lambalgen_construct(u, pts, shift_transform(), 64);
        EXPECT_TRUE(rep.verified);
        // Cell of the constructed point, checked against the mask directly.
        Word a = apply_point(shift_transform(), pts[0], rep.indices()[0], 2);
        Word b = apply_point(shift_transform(), pts[1], rep.indices()[1], 2);
        EXPECT_FALSE((mask >> (4 * two_bits(a) + two_bits(b))) & 1u);
        ++built;
    }
    EXPECT_GT(built, 0u);
}

// Every 2-coordinate depth-2 set of measure at most 1/2, every pair of periodic
// points with cycle length at most 2, odometer, budget 8.
TEST(Construction, ExhaustiveSmallInstances) {
    std::vector<Point> periodic{Point::periodic(""_w, "0"_w), Point::periodic(""_w, "1"_w),
                                Point::periodic(""_w, "01"_w), Point::periodic(""_w, "10"_w)};
    const auto odo = odometer_transform();
    std::size_t ok = 0, trapped = 0;
    for (std::uint32_t mask = 0; mask < (1u << 16); ++mask) {
        if (std::popcount(mask) > 8) continue;
        ProductClopen u = from_mask(mask);
        for (const auto& p0 : periodic) {
            for (const auto& p1 : periodic) {
                try {
                    auto rep = lambalgen_construct(u, {p0, p1}, odo, 8);
                    ASSERT_TRUE(rep.verified);
                    for (std::size_t i = 0; i < rep.steps.size(); ++i) {
                        const auto& st = rep.steps[i];
                        ASSERT_LE(st.complex_measure, q(static_cast<std::int64_t>(i) + 1, static_cast<std::int64_t>(i) + 2));
                        ASSERT_LE(st.v_measure, st.ladder_bound / st.threshold);
                    }
                    Word a = apply_point(odo, p0, rep.indices()[0], 2);
                    Word b = apply_point(odo, p1, rep.indices()[1], 2);
                    ASSERT_FALSE((mask >> (4 * two_bits(a) + two_bits(b))) & 1u);
                    ++ok;
                } catch (const TrappedError& e) {
                    // The odometer cycles through all 2^d prefixes, so a trapped orbit fills V_i.
                    ASSERT_EQ(e.orbit().size(), 9u);
                    for (const auto& w : e.orbit()) ASSERT_EQ(e.v().decide(w), true);
                    ASSERT_LT(e.v_measure(), 1);
                    ++trapped;
                }
            }
        }
    }
    EXPECT_GT(ok, 0u);
    RecordProperty("succeeded", static_cast<int>(ok));
    RecordProperty("trapped", static_cast<int>(trapped));
}
