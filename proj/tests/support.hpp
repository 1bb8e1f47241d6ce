// Shared fixtures and independent oracles for the test suites.
#pragma once

#include <random>
#include <set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fracwalk/fracwalk.hpp"

namespace testsupport {

// Path 0-1-2-3-4 with three observable vertices; the standing small fixture.
inline fracwalk::Graph fixture_p5() {
    return fracwalk::Graph(5, 3, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
}

// Star on five vertices, center 0.
inline fracwalk::Graph fixture_star(int observable = 3) {
    return fracwalk::Graph(5, observable, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

inline fracwalk::Graph complete_graph(int n, int observable) {
    std::vector<fracwalk::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    return fracwalk::Graph(n, observable, std::move(edges));
}

inline fracwalk::Graph path_graph(int n, int observable) {
    std::vector<fracwalk::Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return fracwalk::Graph(n, observable, std::move(edges));
}

// Random spanning tree plus extra edges; always connected.
inline fracwalk::Graph random_connected_graph(std::mt19937_64& rng, int n, int observable,
                                              double extra_edge_prob = 0.3) {
    std::vector<fracwalk::Edge> edges;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        edges.push_back({parent(rng), v});
    }
    std::set<fracwalk::Edge> have(edges.begin(), edges.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!have.count({i, j}) && unit(rng) < extra_edge_prob) {
                have.insert({i, j});
                edges.push_back({i, j});
            }
    return fracwalk::Graph(n, observable, std::move(edges));
}

inline Eigen::VectorXd random_gamma(std::mt19937_64& rng, int n, double lo = 0.5, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::VectorXd gamma(n);
    for (int i = 0; i < n; ++i) gamma(i) = dist(rng);
    return gamma;
}

inline Eigen::VectorXd random_unit_vector(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

// Independent all-pairs oracle against the BFS implementation.
inline Eigen::MatrixXi floyd_warshall(const fracwalk::Graph& g) {
    const int n = g.n();
    const int inf = 1 << 20;
    Eigen::MatrixXi d = Eigen::MatrixXi::Constant(n, n, inf);
    for (int i = 0; i < n; ++i) d(i, i) = 0;
    for (auto [a, b] : g.edges()) {
        d(a, b) = 1;
        d(b, a) = 1;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
    return d;
}

// Exact-arithmetic rank of the observable-to-hidden kernel block
// (1 / d(x,y)^alpha) for integer alpha, via Gaussian elimination over
// rationals. Independent of the SVD-based rank used by the library.
inline int exact_kernel_rank(const fracwalk::Graph& g, int alpha) {
    using rational = boost::multiprecision::cpp_rational;
    using bigint = boost::multiprecision::cpp_int;
    const auto dist = fracwalk::all_pairs_distances(g);
    const int rows = g.observable_count();
    const int cols = g.hidden_count();
    if (cols == 0) return 0;
    std::vector<std::vector<rational>> m(rows, std::vector<rational>(cols));
    for (int x = 0; x < rows; ++x)
        for (int y = 0; y < cols; ++y) {
            bigint denom = 1;
            for (int k = 0; k < alpha; ++k) denom *= dist(x, rows + y);
            m[x][y] = rational(1, denom);
        }
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int row = rank; row < rows; ++row)
            if (m[row][col] != 0) {
                pivot = row;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        for (int row = 0; row < rows; ++row) {
            if (row == rank || m[row][col] == 0) continue;
            const rational factor = m[row][col] / m[rank][col];
            for (int c = col; c < cols; ++c) m[row][c] -= factor * m[rank][c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace testsupport
