#include <gtest/gtest.h>

#include "geoclose/spec_io.hpp"
#include "oracles.hpp"

using namespace geoclose;

namespace {

// Six reals with the group S3 wr S2 preserving the blocks {0,1,2}, {3,4,5}.
LeveledClosureSystem six_points_in_two_blocks() {
    std::vector<Element> els;
    for (int i = 0; i < 6; ++i) els.push_back({i, 0, std::string(1, static_cast<char>('a' + i))});
    std::vector<std::vector<long long>> gens{{1, 0, 2, 3, 4, 5}, {1, 2, 0, 3, 4, 5}, {3, 4, 5, 0, 1, 2}};
    return LeveledClosureSystem(els, 0, RulesClosure{}, gens);
}

QuotientSpec two_block_spec(std::vector<std::vector<std::vector<Pos>>> classes) {
    QuotientSpec q;
    q.base_size = 6;
    q.relations.push_back({1, std::move(classes), 1});
    return q;
}

}  // namespace

TEST(StructureLab, BuildersProduceValidSystems) {
    ValidationOptions exhaustive;
    exhaustive.require_exhaustive = true;
    for (const auto& sys : {build_equivalence_example(3, 3), build_equivalence_example(2, 2),
                            build_nonexchange_example(), build_pure_set(5),
                            build_quotient_system(equality_quotient_spec(6), build_pure_set(6)),
                            build_trivial_acl_graph({{0, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}}, 2),
                            random_rules_system(5, 9, 2, 8)})
        EXPECT_TRUE(validate(sys, exhaustive).ok());
}

TEST(StructureLab, EquivalenceExampleShape) {
    const auto sys = build_equivalence_example(3, 3);
    EXPECT_EQ(sys.size(), 12);
    EXPECT_EQ(sys.reals().size(), 9);
    EXPECT_EQ(sys.group()->order(), 1296U);
    const Pos a = sys.resolve("a"), b = sys.resolve("b"), d = sys.resolve("d");
    EXPECT_EQ(sys.closure(ElementSet::single(a)), ElementSet::of({a, sys.resolve("[a]")}));
    EXPECT_TRUE(sys.closure(ElementSet::single(b)).contains(sys.resolve("[a]")));
    EXPECT_FALSE(sys.closure(ElementSet::single(d)).contains(sys.resolve("[a]")));
    EXPECT_EQ(sys.closure(ElementSet::single(sys.resolve("[a]"))), ElementSet::single(sys.resolve("[a]")));
    EXPECT_THROW(build_equivalence_example(1, 3), Error);
    EXPECT_THROW(build_equivalence_example(20, 4), UniverseTooLarge);
}

TEST(StructureLab, EqualityQuotientIsInteralgebraic) {
    const auto base = build_pure_set(6);
    const auto q = build_quotient_system(equality_quotient_spec(6), base);
    EXPECT_EQ(q.size(), 12);
    for (Pos p = 0; p < 6; ++p) {
        const Pos cls = static_cast<Pos>(6 + p);
        EXPECT_EQ(q.element(cls).level, 1);
        EXPECT_EQ(q.closure(ElementSet::single(p)), q.closure(ElementSet::single(cls)));
        EXPECT_TRUE(q.closure(ElementSet::single(p)).contains(cls));
    }
}

TEST(StructureLab, TwoBlockQuotientDiffersFromEquivalenceExample) {
    const auto q = build_quotient_system(two_block_spec({{{0}, {1}, {2}}, {{3}, {4}, {5}}}),
                                         six_points_in_two_blocks());
    EXPECT_TRUE(validate(q).ok());
    EXPECT_EQ(q.size(), 8);
    // Fixing a fixes its block, hence the other block too.
    EXPECT_EQ(q.closure(ElementSet::single(0)), ElementSet::of({0, 6, 7}));
    // Fixing two points of a block fixes the third.
    EXPECT_TRUE(q.closure(ElementSet::of({0, 1})).contains(2));
    EXPECT_FALSE(find_isomorphism(q, build_equivalence_example(2, 3)));
}

TEST(StructureLab, QuotientRejectsBadRelations) {
    const auto base = six_points_in_two_blocks();
    EXPECT_THROW(build_quotient_system(two_block_spec({{{0}, {1}}, {{2}, {3}, {4}, {5}}}), base),
                 RelationNotInvariant);
    EXPECT_THROW(build_quotient_system(two_block_spec({{{0}, {1}, {2}}, {{2}, {3}, {4}, {5}}}), base), NotEquivalence);
    EXPECT_THROW(build_quotient_system(two_block_spec({{{0}, {1}, {2}}, {{3}, {4}}}), base), NotEquivalence);
    EXPECT_THROW(build_quotient_system(equality_quotient_spec(5), base), Error);
}

TEST(StructureLab, TrivialGroupMakesEverythingClosed) {
    std::vector<Element> els;
    for (int i = 0; i < 3; ++i) els.push_back({i, 0, ""});
    const LeveledClosureSystem base(els, 0, RulesClosure{}, std::vector<std::vector<long long>>{});
    const auto q = build_quotient_system(equality_quotient_spec(3), base);
    for (ElementSet s : subsets_up_to(q.universe(), 2)) EXPECT_EQ(q.closure(s), q.universe());
}

TEST(StructureLab, IsomorphismFindsRelabelling) {
    const auto a = build_equivalence_example(2, 3);
    Json j = system_to_json(a);
    // Reverse the ids.
    const long long top = a.size() - 1;
    for (auto& e : j["elements"]) e["id"] = top - e["id"].get<long long>();
    for (auto& r : j["closure"]["rules"])
        for (const char* k : {"premise", "conclusion"})
            for (auto& v : r[k]) v = top - v.get<long long>();
    for (auto& g : j["automorphisms"]["generators"])
        for (auto& v : g) v = top - v.get<long long>();
    const auto b = system_from_json(j);
    const auto f = find_isomorphism(a, b);
    ASSERT_TRUE(f);
    for (ElementSet s : subsets_up_to(a.universe(), a.size())) EXPECT_EQ(apply(*f, a.closure(s)), b.closure(apply(*f, s)));
    EXPECT_FALSE(find_isomorphism(a, build_pure_set(8)));
}

TEST(StructureLab, TrivialGraphPassesExchangeAtEveryLevel) {
    const auto sys = build_trivial_acl_graph({{0, 1, 1, 0}, {1, 0, 0, 0}, {1, 0, 0, 1}, {0, 0, 1, 0}}, 2);
    EXPECT_EQ(sys.group()->order(), 2U);
    RankEngine eng(sys);
    for (int n = 0; n <= 2; ++n) {
        EXPECT_TRUE(is_trivial_up_to(sys, n));
        EXPECT_FALSE(check_exchange_all(eng, n));
        EXPECT_TRUE(oracle::exchange_holds(sys, n, 0));
    }
    EXPECT_EQ(verify_soft_ei(sys).size(), static_cast<std::size_t>(sys.size()));
    EXPECT_THROW(build_trivial_acl_graph({{0, 1}, {0, 0}}, 1), Error);
}

TEST(StructureLab, RandomSystemsAreSeeded) {
    EXPECT_EQ(system_to_json(random_rules_system(9, 8, 1, 7)).dump(),
              system_to_json(random_rules_system(9, 8, 1, 7)).dump());
    EXPECT_NE(system_to_json(random_rules_system(9, 8, 1, 7)).dump(),
              system_to_json(random_rules_system(10, 8, 1, 7)).dump());
}

TEST(Fuzzer, IdentityClosuresGiveNoFindings) {
    FuzzConfig cfg;
    cfg.rule_count = 0;
    cfg.trials = 5;
    EXPECT_TRUE(fuzz_counterexamples(cfg).findings.empty());
}

TEST(Fuzzer, InjectedNonExchangeSystemIsRediscoveredAndShrunk) {
    FuzzConfig cfg;
    cfg.trials = 0;
    cfg.injected = build_nonexchange_example();
    const FuzzCase fc = fuzz_counterexamples(cfg);
    ASSERT_GE(fc.findings.size(), 2U);
    bool exchange = false, symmetry = false;
    for (const Finding& f : fc.findings) {
        EXPECT_EQ(f.trial, 0U);
        EXPECT_LE(f.system->size(), 6);
        RankEngine eng(*f.system);
        if (f.kind == Finding::Kind::exchange) {
            exchange = true;
            EXPECT_EQ(f.system->size(), 3);
            EXPECT_TRUE(replays(eng, f.exchange));
        } else {
            symmetry = true;
            EXPECT_TRUE(symmetry_fails(eng, f.symmetry));
        }
    }
    EXPECT_TRUE(exchange);
    EXPECT_TRUE(symmetry);
}

TEST(Fuzzer, DeterministicAcrossThreadCounts) {
    FuzzConfig cfg;
    cfg.seed = 42;
    cfg.trials = 12;
    const std::string one = fuzz_case_to_json(fuzz_counterexamples(cfg)).dump();
    cfg.threads = 3;
    const std::string three = fuzz_case_to_json(fuzz_counterexamples(cfg)).dump();
    EXPECT_EQ(one, three);
    EXPECT_EQ(one, fuzz_case_to_json(fuzz_counterexamples(cfg)).dump());
}

TEST(Fuzzer, FindingsRoundTripThroughJson) {
    FuzzConfig cfg;
    cfg.seed = 7;
    cfg.trials = 10;
    cfg.injected = build_nonexchange_example();
    const FuzzCase fc = fuzz_counterexamples(cfg);
    const LoadedFuzzCase back = fuzz_case_from_json(Json::parse(fuzz_case_to_json(fc).dump()));
    ASSERT_EQ(back.findings.size(), fc.findings.size());
    for (const auto& f : back.findings) EXPECT_TRUE(witness_replays(f.system, f.witness));
    EXPECT_EQ(fuzz_case_to_json(fuzz_counterexamples(back.config)).dump(), fuzz_case_to_json(fc).dump());
}
