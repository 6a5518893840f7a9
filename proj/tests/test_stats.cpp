#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>

#include "ggen/generators.hpp"
#include "ggen/graph.hpp"
#include "ggen/rng.hpp"
#include "ggen/stats.hpp"

using namespace ggen;

namespace {

Graph random_graph(int n, double p, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    Graph g = untyped_graph(n, {});
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (rand_unit(rng) < p) g.edges.push_back({u, v, 1});
    g.sort_edges();
    return g;
}

// O(n^4) orbit oracle: quadruple enumeration for 4-node orbits, triple/pair
// enumeration for the smaller graphlets. Independent of the ESU path.
std::vector<std::array<long long, 15>> brute_orbits(const Graph& g) {
    const int n = g.n;
    std::vector<std::vector<char>> am(n + 1, std::vector<char>(n + 1, 0));
    for (const Edge& e : g.edges) am[e.src][e.dest] = am[e.dest][e.src] = 1;
    std::vector<std::array<long long, 15>> counts(n + 1, std::array<long long, 15>{});

    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (am[i][j]) counts[i][0]++;

    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            for (int c = b + 1; c <= n; ++c) {
                int e = am[a][b] + am[a][c] + am[b][c];
                if (e == 3) {
                    counts[a][3]++;
                    counts[b][3]++;
                    counts[c][3]++;
                } else if (e == 2) {
                    // path: middle is the node adjacent to both others
                    int mid = am[a][b] && am[a][c] ? a : (am[a][b] && am[b][c] ? b : c);
                    for (int x : {a, b, c}) counts[x][x == mid ? 2 : 1]++;
                }
            }

    int quad[4];
    for (quad[0] = 1; quad[0] <= n; ++quad[0])
        for (quad[1] = quad[0] + 1; quad[1] <= n; ++quad[1])
            for (quad[2] = quad[1] + 1; quad[2] <= n; ++quad[2])
                for (quad[3] = quad[2] + 1; quad[3] <= n; ++quad[3]) {
                    int wdeg[4] = {0, 0, 0, 0}, edges = 0;
                    for (int i = 0; i < 4; ++i)
                        for (int j = i + 1; j < 4; ++j)
                            if (am[quad[i]][quad[j]]) {
                                wdeg[i]++;
                                wdeg[j]++;
                                edges++;
                            }
                    // connectivity of the induced subgraph
                    int seen = 1, frontier = 1;  // bitmask from node 0
                    while (frontier) {
                        int next = 0;
                        for (int i = 0; i < 4; ++i)
                            if (frontier & (1 << i))
                                for (int j = 0; j < 4; ++j)
                                    if (am[quad[i]][quad[j]] && !(seen & (1 << j)))
                                        next |= (1 << j);
                        seen |= next;
                        frontier = next;
                    }
                    if (seen != 15) continue;
                    for (int i = 0; i < 4; ++i) {
                        int orbit = -1;
                        if (edges == 3) {
                            bool star = wdeg[0] == 3 || wdeg[1] == 3 || wdeg[2] == 3 ||
                                        wdeg[3] == 3;
                            orbit = star ? (wdeg[i] == 3 ? 7 : 6) : (wdeg[i] == 1 ? 4 : 5);
                        } else if (edges == 4) {
                            bool paw = wdeg[0] == 3 || wdeg[1] == 3 || wdeg[2] == 3 ||
                                       wdeg[3] == 3;
                            orbit = paw ? (wdeg[i] == 1 ? 9 : (wdeg[i] == 2 ? 10 : 11)) : 8;
                        } else if (edges == 5) {
                            orbit = wdeg[i] == 2 ? 12 : 13;
                        } else {
                            orbit = 14;
                        }
                        counts[quad[i]][orbit]++;
                    }
                }
    return counts;
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("triangle: degree and clustering concentrate") {
    Graph c3 = untyped_graph(3, {{1, 2}, {2, 3}, {1, 3}});
    GraphStatistics s = compute_statistics(c3);
    REQUIRE(s.degree_hist.size() == 3);
    CHECK(s.degree_hist[2] == doctest::Approx(1.0));
    // every node of C3 has clustering 1 -> last bin
    CHECK(s.clustering_hist.back() == doctest::Approx(1.0));
}

TEST_CASE("star: all clustering coefficients zero") {
    Graph s4 = untyped_graph(5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}});
    auto c = clustering_coefficients(s4);
    for (double x : c) CHECK(x == 0.0);
    GraphStatistics s = compute_statistics(s4);
    CHECK(s.clustering_hist[0] == doctest::Approx(1.0));
}

TEST_CASE("C4 normalized Laplacian eigenvalues are {0,1,1,2}") {
    Graph c4 = untyped_graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
    auto ev = normalized_laplacian_eigenvalues(c4);
    REQUIRE(ev.size() == 4);
    CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ev[3] == doctest::Approx(2.0).epsilon(1e-9));

    // independent dense solver agreement
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized_laplacian(c4));
    for (int i = 0; i < 4; ++i)
        CHECK(ev[i] == doctest::Approx(solver.eigenvalues()[i]).epsilon(1e-9));
}

TEST_CASE("jacobi matches the independent solver on random graphs") {
    for (int trial = 0; trial < 5; ++trial) {
        Graph g = random_graph(12, 0.3, 100 + trial);
        auto ev = normalized_laplacian_eigenvalues(g);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized_laplacian(g));
        for (int i = 0; i < 12; ++i)
            CHECK(ev[i] == doctest::Approx(solver.eigenvalues()[i]).epsilon(1e-8));
    }
}

TEST_CASE("spectrum lies in [0,2]; trace equals n without isolated nodes") {
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = random_tree(10, 300 + trial);  // trees have no isolated nodes
        auto ev = normalized_laplacian_eigenvalues(g);
        double sum = 0.0;
        for (double x : ev) {
            CHECK(x >= -1e-9);
            CHECK(x <= 2.0 + 1e-9);
            sum += x;
        }
        CHECK(sum == doctest::Approx(10.0).epsilon(1e-8));
    }
}

TEST_CASE("orbit counts agree with quadruple brute force on n <= 12") {
    for (int trial = 0; trial < 8; ++trial) {
        int n = 5 + trial;
        Graph g = random_graph(n, 0.35, 500 + trial);
        auto fast = orbit_counts(g);
        auto slow = brute_orbits(g);
        for (int i = 1; i <= n; ++i)
            for (int o = 0; o < 15; ++o) {
                INFO("node ", i, " orbit ", o);
                CHECK(fast[i][o] == slow[i][o]);
            }
    }
    // a case with every 4-node graphlet present
    Graph k4_plus = untyped_graph(
        7, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}, {4, 5}, {5, 6}, {6, 7}});
    auto fast = brute_orbits(k4_plus);
    auto esu = orbit_counts(k4_plus);
    for (int i = 1; i <= 7; ++i)
        for (int o = 0; o < 15; ++o) CHECK(fast[i][o] == esu[i][o]);
}

TEST_CASE("histograms are normalized") {
    for (int trial = 0; trial < 5; ++trial) {
        Graph g = random_graph(14, 0.3, 900 + trial);
        GraphStatistics s = compute_statistics(g);
        auto sums_to_one = [](const std::vector<double>& h) {
            double s = 0.0;
            for (double x : h) s += x;
            return s;
        };
        CHECK(sums_to_one(s.degree_hist) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sums_to_one(s.clustering_hist) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sums_to_one(s.spectrum_hist) == doctest::Approx(1.0).epsilon(1e-9));
        if (g.m() > 0)
            CHECK(sums_to_one(s.orbit_hist) == doctest::Approx(1.0).epsilon(1e-9));
    }
    // single node: degree histogram concentrates at 0, orbit total is zero
    GraphStatistics s = compute_statistics(untyped_graph(1, {}));
    CHECK(s.degree_hist[0] == doctest::Approx(1.0));
}

TEST_SUITE_END();
