#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "palab/tree.hpp"

using namespace palab;

namespace {
TreeSnapshot make(std::vector<NodeId> tail) {
    TreeSnapshot t;
    t.parent = {kNoParent};
    t.parent.insert(t.parent.end(), tail.begin(), tail.end());
    return t;
}
}  // namespace

TEST(Census, PathOnFourNodes) {
    const auto c = census_from_snapshot(make({0, 1, 2}));
    EXPECT_EQ(c.count(1), 2u);
    EXPECT_EQ(c.count(2), 2u);
    EXPECT_EQ(c.max_degree(), 2u);
}

TEST(Census, StarOnFourNodes) {
    const auto c = census_from_snapshot(make({0, 0, 0}));
    EXPECT_EQ(c.count(1), 3u);
    EXPECT_EQ(c.count(3), 1u);
    EXPECT_EQ(c.count(2), 0u);
}

TEST(Census, SeedEdgeOnly) {
    const auto c = census_from_snapshot(make({0}));
    EXPECT_EQ(c.count(1), 2u);
    EXPECT_EQ(c.n(), 2u);
}

TEST(Census, MalformedParentArray) {
    EXPECT_THROW(census_from_snapshot(make({0, 2})), StructureError);
    EXPECT_THROW(census_from_snapshot(make({1})), StructureError);
    EXPECT_THROW(census_from_snapshot(make({})), StructureError);
}

TEST(Census, TailCounts) {
    const auto c = census_from_snapshot(make({0, 0, 0, 1, 4}));
    // degrees: 0:3, 1:2, 2:1, 3:1, 4:2, 5:1
    EXPECT_EQ(c.count_above(1), 3u);
    EXPECT_EQ(c.count_above(2), 1u);
    EXPECT_EQ(c.count_above(3), 0u);
}

// Property: census matches an adjacency-list count and the handshake identity.
TEST(CensusProperty, MatchesNaiveCountOnRandomTrees) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng() % 10'000;
        TreeSnapshot t{{kNoParent, 0}};
        for (std::size_t i = 2; i < n; ++i) t.parent.push_back(static_cast<NodeId>(rng() % i));
        const auto census = census_from_snapshot(t);
        const auto expected = DegreeCensus::from_degrees(oracle::naive_degrees(t.parent));
        EXPECT_EQ(census, expected);
        EXPECT_EQ(census.degree_sum(), 2 * (n - 1));
        EXPECT_EQ(census.n(), n);
    }
}

TEST(TreeIo, ParentArrayRoundTrip) {
    const auto t = make({0, 0, 1, 3, 3});
    std::stringstream ss;
    write_parent_array(ss, t);
    EXPECT_EQ(ss.str(), "0\n0\n1\n3\n3\n");
    EXPECT_EQ(read_parent_array(ss), t);
}

TEST(TreeIo, RejectsBadParentArrays) {
    std::istringstream bad_order("0\n2\n");
    EXPECT_THROW(read_parent_array(bad_order), StructureError);
    std::istringstream junk("0\nx\n");
    EXPECT_THROW(read_parent_array(junk), FormatError);
    std::istringstream empty("");
    EXPECT_THROW(read_parent_array(empty), StructureError);
}

TEST(TreeIo, LogRoundTrip) {
    EvolutionLog log{{0, 0, 1, 2, 1}};
    std::stringstream ss;
    write_log(ss, log);
    EXPECT_EQ(ss.str(), "1\n2\n1\n");
    EXPECT_EQ(read_log(ss), log);
    std::istringstream zero("1\n0\n");
    EXPECT_THROW(read_log(zero), FormatError);
}

TEST(EdgeList, RelabelsIntoRecursiveTree) {
    std::istringstream in("10 20\n20 30\n20 40\n40 50\n");
    const auto t = snapshot_from_edges(in);
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(t.size(), 5u);
    const auto c = census_from_snapshot(t);
    EXPECT_EQ(c.count(1), 3u);
    EXPECT_EQ(c.count(2), 1u);
    EXPECT_EQ(c.count(3), 1u);
}

TEST(EdgeList, RejectsNonTrees) {
    std::istringstream loop("1 1\n");
    EXPECT_THROW(snapshot_from_edges(loop), StructureError);
    std::istringstream cycle("0 1\n1 2\n2 0\n");
    EXPECT_THROW(snapshot_from_edges(cycle), StructureError);
    std::istringstream forest("0 1\n2 3\n4 5\n");  // 6 nodes, 3 edges
    EXPECT_THROW(snapshot_from_edges(forest), StructureError);
    std::istringstream disconnected("0 1\n1 2\n0 2\n3 4\n");  // 5 nodes, 4 edges, has a cycle
    EXPECT_THROW(snapshot_from_edges(disconnected), StructureError);
    std::istringstream junk("0 1\n1 x\n");
    EXPECT_THROW(snapshot_from_edges(junk), FormatError);
}
