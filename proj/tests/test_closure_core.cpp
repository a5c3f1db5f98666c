#include <gtest/gtest.h>

#include "geoclose/spec_io.hpp"
#include "oracles.hpp"

using namespace geoclose;

namespace {

std::vector<Element> reals(int n) {
    std::vector<Element> els;
    for (int i = 0; i < n; ++i) els.push_back({i, 0, std::string(1, static_cast<char>('a' + i))});
    return els;
}

LeveledClosureSystem table_system(std::vector<std::pair<ElementSet, ElementSet>> entries,
                                  std::optional<std::vector<std::vector<long long>>> gens = std::nullopt) {
    return LeveledClosureSystem(reals(3), 0, TableClosure{std::move(entries)}, std::move(gens));
}

}  // namespace

TEST(ClosureCore, RulesIterateToFixpoint) {
    RulesClosure r;
    r.rules.push_back({ElementSet::single(0), ElementSet::single(1)});
    r.rules.push_back({ElementSet::of({1, 2}), ElementSet::single(3)});
    LeveledClosureSystem sys(reals(4), 0, r);
    EXPECT_EQ(sys.closure(ElementSet::single(0)), ElementSet::of({0, 1}));
    EXPECT_EQ(sys.closure(ElementSet::of({0, 2})), ElementSet::of({0, 1, 2, 3}));
    EXPECT_TRUE(validate(sys).ok());
}

TEST(ClosureCore, ValidationFindsEachAxiomFailure) {
    {
        auto sys = table_system({{ElementSet::single(0), ElementSet::of({0, 1})},
                                 {ElementSet::single(1), ElementSet::of({1, 2})}});
        const auto rep = validate(sys);
        ASSERT_NE(rep.find(Axiom::idempotent), nullptr);
        EXPECT_EQ(rep.find(Axiom::idempotent)->first, ElementSet::single(0));
    }
    {
        auto sys = table_system({{ElementSet::single(0), ElementSet::single(1)}});
        const auto rep = validate(sys);
        ASSERT_NE(rep.find(Axiom::extensive), nullptr);
        EXPECT_EQ(rep.find(Axiom::extensive)->first, ElementSet::single(0));
    }
    {
        auto sys = table_system({{ElementSet::single(0), ElementSet::of({0, 2})},
                                 {ElementSet::of({0, 1}), ElementSet::of({0, 1})}});
        const auto rep = validate(sys);
        ASSERT_NE(rep.find(Axiom::monotone), nullptr);
        EXPECT_EQ(rep.find(Axiom::monotone)->second, ElementSet::of({0, 1}));
    }
    {
        auto sys = table_system({{ElementSet::single(0), ElementSet::of({0, 1})}}, {{{2, 1, 0}}});
        const auto rep = validate(sys);
        ASSERT_NE(rep.find(Axiom::automorphism_commutes), nullptr);
    }
}

TEST(ClosureCore, GeneratorMustPreserveLevels) {
    std::vector<Element> els = reals(2);
    els[1].level = 1;
    LeveledClosureSystem sys(els, 1, RulesClosure{}, std::vector<std::vector<long long>>{{1, 0}});
    EXPECT_NE(validate(sys).find(Axiom::automorphism_level), nullptr);
}

TEST(ClosureCore, ConstructionErrors) {
    auto dup = reals(2);
    dup[1].id = 0;
    EXPECT_THROW(LeveledClosureSystem(dup, 0, RulesClosure{}), InvalidSystem);
    auto high = reals(2);
    high[1].level = 3;
    EXPECT_THROW(LeveledClosureSystem(high, 1, RulesClosure{}), InvalidSystem);
    EXPECT_THROW(LeveledClosureSystem(reals(2), 0, OrbitClosure{}), NoGroup);
    EXPECT_THROW(LeveledClosureSystem(reals(2), 0, RulesClosure{}, std::vector<std::vector<long long>>{{0, 0}}),
                 InvalidSystem);
    std::vector<Element> big;
    for (int i = 0; i < 65; ++i) big.push_back({i, 0, ""});
    EXPECT_THROW(LeveledClosureSystem(big, 0, RulesClosure{}), UniverseTooLarge);
}

TEST(ClosureCore, LevelsAndAcl) {
    const auto sys = build_equivalence_example(3, 3);
    EXPECT_EQ(sys.level_mask(0).size(), 9);
    EXPECT_EQ(sys.level_mask(1).size(), 12);
    EXPECT_THROW(sys.level_mask(2), Error);
    const Pos a = sys.resolve("a"), cls = sys.resolve("[a]");
    EXPECT_EQ(sys.acl(ElementSet::single(a), 1), ElementSet::of({a, cls}));
    EXPECT_EQ(sys.acl(ElementSet::single(a), 0), ElementSet::single(a));
    EXPECT_EQ(sys.acl(ElementSet::single(cls), 1), ElementSet::single(cls));
    for (ElementSet s : subsets_up_to(sys.universe(), 3)) EXPECT_TRUE(level_monotone_check(sys, s, 0, 1));
}

TEST(ClosureCore, ClosedSetsAreExactlyTheFixedPoints) {
    const auto sys = build_equivalence_example(2, 2);
    const auto closed = closed_sets(sys);
    std::size_t count = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << sys.size()); ++s)
        if (sys.closure(ElementSet(s)).bits() == s) ++count;
    EXPECT_EQ(closed.size(), count);
}

TEST(ClosureCore, InducedSubsystemRestrictsClosure) {
    const auto sys = build_nonexchange_example();
    const ElementSet keep = ElementSet::of({0, 1, 2});
    const auto sub = induced_subsystem(sys, keep);
    EXPECT_EQ(sub.size(), 3);
    EXPECT_EQ(sub.closure(ElementSet::of({0, 1})), ElementSet::of({0, 1, 2}));
    EXPECT_TRUE(validate(sub).ok());
    const auto tab = with_table_closure(sys);
    for (std::uint64_t s = 0; s < 64; ++s) EXPECT_EQ(tab.closure(ElementSet(s)), sys.closure(ElementSet(s)));
}

TEST(ClosureCore, TrivialityDetection) {
    const auto graph = build_trivial_acl_graph({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}, 1);
    EXPECT_TRUE(is_trivial_up_to(graph, 1));
    EXPECT_FALSE(is_trivial_up_to(build_nonexchange_example(), 0));
}

TEST(SpecIo, RoundTripPreservesEverything) {
    for (const auto& sys : {build_equivalence_example(2, 3), build_nonexchange_example(),
                            build_quotient_system(equality_quotient_spec(3), build_pure_set(3)),
                            with_table_closure(build_nonexchange_example())}) {
        const Json j = system_to_json(sys);
        const auto back = system_from_json(Json::parse(j.dump()));
        EXPECT_EQ(system_to_json(back).dump(), j.dump());
        for (ElementSet s : subsets_up_to(sys.universe(), sys.size())) EXPECT_EQ(back.closure(s), sys.closure(s));
    }
}

TEST(SpecIo, RejectsUnknownFieldsAndBadIds) {
    Json j = system_to_json(build_nonexchange_example());
    Json extra = j;
    extra["colour"] = "red";
    EXPECT_THROW(system_from_json(extra), ParseError);
    Json bad_el = j;
    bad_el["elements"][0]["weight"] = 3;
    EXPECT_THROW(system_from_json(bad_el), ParseError);
    Json bad_rule = j;
    bad_rule["closure"]["rules"][0]["premise"] = {0, 99};
    EXPECT_THROW(system_from_json(bad_rule), UnknownElement);
    Json bad_kind = j;
    bad_kind["closure"]["kind"] = "magic";
    EXPECT_THROW(system_from_json(bad_kind), ParseError);
    EXPECT_THROW(io::parse_text("{not json", "x"), ParseError);
}

TEST(SpecIo, IdsNeedNotBeContiguousOrSorted) {
    const Json j = Json::parse(R"({"elements":[{"id":10,"level":0,"label":"p"},{"id":3,"level":0}],
        "maxLevel":0,"closure":{"kind":"rules","rules":[{"premise":[10],"conclusion":[3]}]},
        "automorphisms":{"generators":[]}})");
    const auto sys = system_from_json(j);
    EXPECT_EQ(sys.pos_of(3), 0);
    EXPECT_EQ(sys.pos_of(10), 1);
    EXPECT_EQ(sys.closure(ElementSet::single(1)), ElementSet::of({0, 1}));
    EXPECT_EQ(sys.name_of(0), "3");
    EXPECT_EQ(sys.resolve("p"), 1);
}
