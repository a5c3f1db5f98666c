#include <gtest/gtest.h>

#include "geoclose/spec_io.hpp"

using namespace geoclose;

namespace {

struct ClassFamily : ::testing::Test {
    LeveledClosureSystem sys = build_equivalence_example(3, 3);
    DefinableFamily fam = class_membership_family(sys);
    Pos a = sys.resolve("a"), cls = sys.resolve("[a]");
};

}  // namespace

TEST_F(ClassFamily, FamilyIsEquivariant) {
    EXPECT_EQ(fam.fibers.size(), 3U);
    EXPECT_EQ(fam.fiber({cls}).size(), 3);
    EXPECT_NO_THROW(validate_family(sys, fam));
    DefinableFamily broken = fam;
    broken.fibers[{cls}].insert(sys.resolve("d"));
    EXPECT_THROW(validate_family(sys, broken), RelationNotInvariant);
    const auto back = family_from_json(sys, Json::parse(family_to_json(sys, fam).dump()));
    EXPECT_EQ(back.fibers, fam.fibers);
}

TEST_F(ClassFamily, StrongDividingExamples) {
    EXPECT_TRUE(strongly_divides(sys, fam, {cls}, {}, 2));
    EXPECT_FALSE(strongly_divides(sys, fam, {cls}, ElementSet::single(cls), 2));
    EXPECT_FALSE(strongly_divides(sys, fam, {cls}, ElementSet::single(a), 2));
    EXPECT_THROW(strongly_divides(sys, fam, {a}, {}, 2), ParameterUnknown);
    // Monotone in k.
    for (ElementSet c : subsets_up_to(sys.universe(), 1))
        for (int k = 1; k < 4; ++k)
            if (strongly_divides(sys, fam, {cls}, c, k)) EXPECT_TRUE(strongly_divides(sys, fam, {cls}, c, k + 1));
}

TEST_F(ClassFamily, StrongDividingIsEquivariant) {
    for (const Perm* s : sample_automorphisms(*sys.group(), 3, 32))
        for (ElementSet c : subsets_up_to(sys.universe(), 2))
            for (const auto& [p, f] : fam.fibers)
                ASSERT_EQ(strongly_divides(sys, fam, p, c, 2), strongly_divides(sys, fam, apply(*s, p), apply(*s, c), 2));
}

TEST_F(ClassFamily, ConstantFibersNeverDivide) {
    DefinableFamily constant = fam;
    for (auto& [p, f] : constant.fibers) f = ElementSet::of({0, 1, 2, 3, 4, 5, 6, 7, 8});
    EXPECT_FALSE(strongly_divides(sys, constant, {cls}, {}, 2));
    for (int bound = 0; bound <= 2; ++bound) EXPECT_FALSE(thorn_divides_bounded(sys, constant, {cls}, {}, 2, bound));
}

TEST_F(ClassFamily, ThornDividing) {
    const auto d = thorn_divides_bounded(sys, fam, {cls}, {}, 2, 1);
    ASSERT_TRUE(d);
    EXPECT_TRUE(d->empty());
    // Monotone in the bound.
    for (ElementSet c : subsets_up_to(sys.universe(), 1))
        if (thorn_divides_bounded(sys, fam, {cls}, c, 2, 0)) EXPECT_TRUE(thorn_divides_bounded(sys, fam, {cls}, c, 2, 1));
}

TEST_F(ClassFamily, ThornSearchBudget) {
    DefinableFamily constant = fam;
    for (auto& [p, f] : constant.fibers) f = sys.universe();
    EXPECT_THROW(thorn_divides_bounded(sys, constant, {cls}, {}, 2, 3, std::nullopt, 2), SearchBudgetExceeded);
}

TEST_F(ClassFamily, ThornForkingAgainstDisjuncts) {
    const Pos d = sys.resolve("[d]");
    const auto r = thorn_forks(sys, fam, {cls}, {{&fam, {cls}}, {&fam, {d}}}, {}, 2, 1);
    EXPECT_TRUE(r.covered);
    EXPECT_TRUE(r.forks);
    const auto miss = thorn_forks(sys, fam, {cls}, {{&fam, {d}}}, {}, 2, 1);
    EXPECT_FALSE(miss.covered);
    EXPECT_FALSE(miss.forks);
}

TEST_F(ClassFamily, StrongDividingPutsParameterInClosure) {
    const auto rep = strong_dividing_implies_acl(sys, fam);
    EXPECT_EQ(rep.outcome, Outcome::pass);
    EXPECT_GT(rep.checked, 0);
    ProbeConfig bad;
    bad.threshold = 0;
    const auto mis = strong_dividing_implies_acl(sys, fam, bad);
    EXPECT_EQ(mis.outcome, Outcome::fail);
    ASSERT_FALSE(mis.witnesses.empty());
}

TEST_F(ClassFamily, VacuousProbePasses) {
    DefinableFamily constant = fam;
    for (auto& [p, f] : constant.fibers) f = sys.reals();
    const auto rep = strong_dividing_implies_acl(sys, constant);
    EXPECT_EQ(rep.outcome, Outcome::pass);
    EXPECT_EQ(rep.checked, 0);
}

TEST_F(ClassFamily, DependenceBridge) {
    RankEngine eng(sys);
    EXPECT_FALSE(indep_verdict(eng, ElementSet::single(a), ElementSet::single(cls), {}, 1));
    SuiteConfig cfg;
    cfg.max_set_size = 2;
    const auto rep = dependence_bridge_check(sys, cfg, 1);
    EXPECT_EQ(rep.outcome, Outcome::pass);
    EXPECT_GT(rep.checked, 0);
    EXPECT_THROW(dependence_bridge_check(build_nonexchange_example(), cfg, 0), ExchangeViolation);
}
