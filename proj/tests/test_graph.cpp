#include <gtest/gtest.h>

#include "fracwalk/fracwalk.hpp"
#include "support.hpp"

using namespace fracwalk;

TEST(GraphMetric, PathFixtureDistances) {
    const Graph g = testsupport::fixture_p5();
    const DistanceMatrix d = all_pairs_distances(g);
    EXPECT_EQ(d(0, 4), 4);
    EXPECT_EQ(d(1, 3), 2);
    EXPECT_EQ(eccentricity(g, 0), 4);
    EXPECT_EQ(eccentricity(g, 2), 2);
}

TEST(GraphMetric, StarFixtureDistances) {
    const Graph g = testsupport::fixture_star();
    const DistanceMatrix d = all_pairs_distances(g);
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
            EXPECT_EQ(d(i, j), i == j ? 0 : 2);
    EXPECT_EQ(eccentricity(g, 0), 1);
}

TEST(GraphMetric, MatchesFloydWarshallOnRandomGraphs) {
    std::mt19937_64 rng(7001);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> size(2, 12);
        const int n = size(rng);
        const Graph g = testsupport::random_connected_graph(rng, n, 1);
        const DistanceMatrix d = all_pairs_distances(g);
        const Eigen::MatrixXi oracle = testsupport::floyd_warshall(g);
        EXPECT_EQ(d.hops, oracle);

        // Metric axioms and the edge characterization, exactly in integers.
        for (int x = 0; x < n; ++x) {
            EXPECT_EQ(d(x, x), 0);
            int row_max = 0;
            for (int y = 0; y < n; ++y) {
                EXPECT_EQ(d(x, y), d(y, x));
                EXPECT_EQ(d(x, y) == 1, g.adjacent(x, y) && x != y);
                row_max = std::max(row_max, d(x, y));
                for (int z = 0; z < n; ++z) EXPECT_LE(d(x, z), d(x, y) + d(y, z));
            }
            EXPECT_EQ(eccentricity(g, x), row_max);
        }
    }
}

TEST(GraphMetric, LeafSets) {
    EXPECT_EQ(leaf_set(testsupport::fixture_p5()), (std::vector<int>{0, 4}));
    EXPECT_EQ(leaf_set(testsupport::fixture_star()), (std::vector<int>{1, 2, 3, 4}));
    EXPECT_TRUE(leaf_set(testsupport::complete_graph(4, 1)).empty());
}

TEST(GraphMetric, VertexRangeChecked) {
    const Graph g = testsupport::fixture_p5();
    EXPECT_THROW(eccentricity(g, 5), VertexOutOfRange);
    EXPECT_THROW(eccentricity(g, -1), VertexOutOfRange);
}

TEST(GraphValidation, RejectsBadInputs) {
    EXPECT_THROW(Graph(3, 1, {{0, 1}}), DisconnectedGraph);
    EXPECT_THROW(Graph(3, 1, {{0, 0}, {0, 1}, {1, 2}}), InvalidArgument);
    EXPECT_THROW(Graph(3, 1, {{0, 1}, {1, 0}, {1, 2}}), InvalidArgument);
    EXPECT_THROW(Graph(3, 0, {{0, 1}, {1, 2}}), InvalidArgument);
    EXPECT_THROW(Graph(3, 4, {{0, 1}, {1, 2}}), InvalidArgument);
    EXPECT_THROW(Graph(3, 1, {{0, 3}, {0, 1}, {1, 2}}), VertexOutOfRange);
}

TEST(Admissibility, PathFixturePassesBoth) {
    const Graph g = testsupport::fixture_p5();
    const AdmissibilityReport report = check_admissibility(g, 2.0);
    EXPECT_TRUE(report.a1_ok);
    EXPECT_EQ(report.a1_rank, 2);
    EXPECT_EQ(report.a1_rank, testsupport::exact_kernel_rank(g, 2));
    EXPECT_TRUE(report.a2_ok);
    EXPECT_EQ(report.leaf_set, (std::vector<int>{0, 4}));
    EXPECT_EQ(report.max_leaf_eccentricity, 4);
}

TEST(Admissibility, CompleteGraphFailsA1) {
    const Graph g = testsupport::complete_graph(4, 1);
    const AdmissibilityReport report = check_admissibility(g, 2.0);
    EXPECT_FALSE(report.a1_ok);
    EXPECT_LE(report.a1_rank, 1);
    EXPECT_EQ(report.a1_rank, testsupport::exact_kernel_rank(g, 2));
    EXPECT_FALSE(report.a2_ok);
}

TEST(Admissibility, StarFailsA2ForAnyObservableCount) {
    for (int observable = 1; observable <= 4; ++observable) {
        const AdmissibilityReport report =
            check_admissibility(testsupport::fixture_star(observable), 2.0);
        EXPECT_FALSE(report.a2_ok);
    }
}

TEST(Admissibility, SvdRankAgreesWithExactRank) {
    std::mt19937_64 rng(7002);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> size(3, 10);
        const int n = size(rng);
        std::uniform_int_distribution<int> obs(1, n - 1);
        const Graph g = testsupport::random_connected_graph(rng, n, obs(rng));
        const AdmissibilityReport report = check_admissibility(g, 2.0);
        EXPECT_EQ(report.a1_rank, testsupport::exact_kernel_rank(g, 2));
    }
}

TEST(Generator, FourCycleCoreWithPathArms) {
    const Graph core(4, 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    std::vector<Attachment> arms;
    for (int i = 0; i < 4; ++i) arms.push_back({testsupport::path_graph(3, 3), 0});
    const Graph g = generate_admissible_graph(core, arms, 2.0, 11);
    EXPECT_EQ(g.n(), 16);
    EXPECT_EQ(g.observable_count(), 12);
    EXPECT_TRUE(check_admissibility(g, 2.0).a1_ok);
}

TEST(Generator, SingleEdgeCoreWithTwoLongArms) {
    const Graph core(2, 2, {{0, 1}});
    std::vector<Attachment> arms{{testsupport::path_graph(4, 4), 0},
                                 {testsupport::path_graph(4, 4), 0}};
    const Graph g = generate_admissible_graph(core, arms, 2.0, 3);
    const AdmissibilityReport report = check_admissibility(g, 2.0);
    EXPECT_TRUE(report.a1_ok);
    EXPECT_TRUE(report.a2_ok);
}

TEST(Generator, RejectsOversizedCore) {
    std::vector<Edge> cycle6;
    for (int i = 0; i < 6; ++i) cycle6.push_back({i, (i + 1) % 6});
    const Graph core(6, 6, cycle6);
    std::vector<Attachment> arms;
    for (int i = 0; i < 6; ++i) arms.push_back({testsupport::path_graph(3, 3), 0});
    EXPECT_THROW(generate_admissible_graph(core, arms, 2.0, 0), TooManyHiddenVertices);
}

TEST(Generator, RejectsBadAnchorsAndCounts) {
    const Graph core(2, 2, {{0, 1}});
    std::vector<Attachment> bad_anchor{{testsupport::path_graph(3, 3), 5},
                                       {testsupport::path_graph(3, 3), 0}};
    EXPECT_THROW(generate_admissible_graph(core, bad_anchor, 2.0, 0), InvalidAnchor);
    std::vector<Attachment> too_few{{testsupport::path_graph(3, 3), 0}};
    EXPECT_THROW(generate_admissible_graph(core, too_few, 2.0, 0), InvalidArgument);
}

TEST(Generator, RandomInstancesAreAdmissible) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Graph g = random_admissible_graph(seed);
        EXPECT_LE(g.n(), 25);
        const AdmissibilityReport report = check_admissibility(g, 2.5);
        EXPECT_TRUE(report.a1_ok) << "seed " << seed;
        EXPECT_TRUE(report.a2_ok) << "seed " << seed;
    }
}
