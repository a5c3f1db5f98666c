#include <gtest/gtest.h>

#include "geoclose/structure_lab.hpp"
#include "oracles.hpp"

using namespace geoclose;

TEST(Pregeometry, NonExchangeWitnessOverEmptyBase) {
    const auto sys = build_nonexchange_example();
    RankEngine eng(sys);
    const auto w = check_exchange(eng, {}, 0);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->base, ElementSet());
    EXPECT_EQ(w->tuple, (std::vector<Pos>{sys.resolve("x"), sys.resolve("y"), sys.resolve("z")}));
    EXPECT_TRUE(replays(eng, *w));
    // The pair form over a closed base is found by the full check.
    const auto all = check_exchange_all(eng, 0);
    ASSERT_TRUE(all);
    EXPECT_TRUE(replays(eng, *all));
    EXPECT_EQ(all->tuple.size(), 2U);
    EXPECT_FALSE(oracle::exchange_holds(sys, 0));
}

TEST(Pregeometry, ReplayRejectsTamperedWitness) {
    const auto sys = build_nonexchange_example();
    RankEngine eng(sys);
    EXPECT_FALSE(replays(eng, ExchangeWitness{{}, 0, {0, 3, 2}}));
    EXPECT_FALSE(replays(eng, ExchangeWitness{{}, 0, {0}}));
    EXPECT_FALSE(replays(eng, ExchangeWitness{ElementSet::single(2), 0, {0, 1, 2}}));
}

TEST(Pregeometry, ExchangeAgreesWithBruteForce) {
    int failing = 0;
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const auto sys = random_rules_system(seed, 6, 1, 5);
        RankEngine eng(sys);
        for (int n = 0; n <= 1; ++n) {
            const bool holds = !check_exchange_all(eng, n);
            ASSERT_EQ(holds, oracle::exchange_holds(sys, n, 2)) << "seed " << seed << " n " << n;
            failing += !holds;
        }
    }
    EXPECT_GT(failing, 0);
}

TEST(Pregeometry, ExchangeHoldsOnPaperExamples) {
    for (const auto& sys : {build_equivalence_example(3, 3), build_equivalence_example(2, 3),
                            build_quotient_system(equality_quotient_spec(4), build_pure_set(4))}) {
        RankEngine eng(sys);
        for (int n = 0; n <= sys.max_level(); ++n) EXPECT_FALSE(check_exchange_all(eng, n));
    }
}

TEST(Pregeometry, SliceCarrierAndBases) {
    const auto sys = build_equivalence_example(3, 3);
    RankEngine eng(sys);
    const Pos a = sys.resolve("a"), b = sys.resolve("b"), cls = sys.resolve("[a]");
    const auto sl = slice(eng, {}, 1);
    // Over ∅ at level 1 the rank-1 elements are the class elements.
    EXPECT_EQ(sl.carrier.size(), 3);
    EXPECT_TRUE(sl.carrier.contains(cls));
    EXPECT_THROW(is_independent(sl, ElementSet::single(a)), NotInCarrier);
    const auto over_class = slice(eng, ElementSet::single(cls), 1);
    EXPECT_TRUE(over_class.carrier.contains(a));
    EXPECT_TRUE(over_class.carrier.contains(b));
    EXPECT_EQ(dimension(eng, over_class, over_class.carrier), max_independent_size(over_class, over_class.carrier));
    EXPECT_EQ(dimension(eng, sl, sl.carrier), 3);
}

TEST(Pregeometry, DimensionMatchesBruteForceUnderExchange) {
    const auto sys = build_trivial_acl_graph({{0, 1, 1, 0}, {1, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}}, 1);
    RankEngine eng(sys);
    for (ElementSet c : closed_sets(sys)) {
        for (int n = 0; n <= 1; ++n) {
            const auto sl = slice(eng, c, n);
            ASSERT_EQ(dimension(eng, sl, sl.carrier), max_independent_size(sl, sl.carrier));
        }
    }
}

TEST(Pregeometry, BasisSearchSurfacesExchangeFailure) {
    const auto sys = build_nonexchange_example();
    RankEngine eng(sys);
    const auto sl = slice(eng, {}, 0);
    const ElementSet xyz = ElementSet::of({0, 1, 2});
    try {
        (void)find_basis(eng, sl, xyz, {0, 1, 2});
        FAIL() << "expected an exchange violation";
    } catch (const ExchangeViolation& e) {
        EXPECT_TRUE(replays(eng, e.witness()));
    }
}
