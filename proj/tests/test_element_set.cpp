#include <gtest/gtest.h>

#include <set>

#include "geoclose/element_set.hpp"
#include "oracles.hpp"

using namespace geoclose;

TEST(ElementSet, BasicOperations) {
    ElementSet s = ElementSet::of({0, 3, 5});
    EXPECT_EQ(s.size(), 3);
    EXPECT_TRUE(s.contains(3));
    EXPECT_FALSE(s.contains(4));
    EXPECT_EQ(s.front(), 0);
    EXPECT_EQ(s.back(), 5);
    EXPECT_EQ((s | ElementSet::single(4)).size(), 4);
    EXPECT_EQ((s & ElementSet::of({3, 4})), ElementSet::single(3));
    EXPECT_EQ((s - ElementSet::single(0)), ElementSet::of({3, 5}));
    EXPECT_TRUE(ElementSet::of({3}).subset_of(s));
    EXPECT_EQ(s.to_vector(), (std::vector<Pos>{0, 3, 5}));
    EXPECT_EQ(ElementSet::first_n(64).size(), 64);
    EXPECT_TRUE(ElementSet().empty());
}

TEST(ElementSet, SubsetEnumerationVisitsEverySubsetOnce) {
    const ElementSet base = ElementSet::of({1, 4, 6, 9});
    std::set<std::uint64_t> seen;
    for_each_subset(base, [&](ElementSet s) {
        EXPECT_TRUE(s.subset_of(base));
        EXPECT_TRUE(seen.insert(s.bits()).second);
    });
    EXPECT_EQ(seen.size(), 16U);
}

TEST(ElementSet, FixedSizeSubsetsAreLexicographic) {
    std::vector<std::vector<Pos>> got;
    for_each_subset_of_size(ElementSet::of({0, 1, 2, 3}), 2, [&](ElementSet s) { got.push_back(s.to_vector()); });
    const std::vector<std::vector<Pos>> want{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    EXPECT_EQ(got, want);
}

TEST(ElementSet, SubsetsUpToMatchesBruteForceCount) {
    const auto sets = subsets_up_to(ElementSet::first_n(8), 3);
    EXPECT_EQ(sets.size(), oracle::small_sets(8, 3).size());
    for (std::size_t i = 1; i < sets.size(); ++i) EXPECT_LE(sets[i - 1].size(), sets[i].size());
}
