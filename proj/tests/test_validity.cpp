#include "doctest.h"

#include "ggen/generators.hpp"
#include "ggen/graph.hpp"
#include "ggen/rng.hpp"
#include "ggen/validity.hpp"

using namespace ggen;

TEST_SUITE_BEGIN("validity");

TEST_CASE("K4 is planar, K5 is not") {
    Graph k4 = untyped_graph(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    CHECK(is_valid(k4, Family::planar));
    Graph k5 = untyped_graph(5, {});
    for (int u = 1; u <= 5; ++u)
        for (int v = u + 1; v <= 5; ++v) k5.add_edge(u, v);
    CHECK(!is_valid(k5, Family::planar));
    // K3,3 via Kuratowski as well
    Graph k33 = untyped_graph(6, {});
    for (int u = 1; u <= 3; ++u)
        for (int v = 4; v <= 6; ++v) k33.add_edge(u, v);
    CHECK(!is_planar(k33));
}

TEST_CASE("planarity respects the Euler bound m > 3n-6") {
    for (int trial = 0; trial < 10; ++trial) {
        int n = 6 + trial;
        Rng rng = make_rng(42 + trial);
        Graph g = untyped_graph(n, {});
        std::vector<std::pair<int, int>> pairs;
        for (int u = 1; u <= n; ++u)
            for (int v = u + 1; v <= n; ++v) pairs.push_back({u, v});
        shuffle_vec(pairs, rng);
        for (int i = 0; i < 3 * n - 5 && i < static_cast<int>(pairs.size()); ++i)
            g.add_edge(pairs[i].first, pairs[i].second);
        if (g.m() > 3 * g.n - 6) CHECK(!is_planar(g));
    }
}

TEST_CASE("tree validity") {
    CHECK(is_valid(untyped_graph(1, {}), Family::tree));
    CHECK(is_valid(untyped_graph(3, {{1, 2}, {2, 3}}), Family::tree));
    CHECK(!is_valid(untyped_graph(3, {{1, 2}}), Family::tree));               // disconnected
    CHECK(!is_valid(untyped_graph(3, {{1, 2}, {2, 3}, {1, 3}}), Family::tree));  // cycle
}

TEST_CASE("paths and caterpillars are lobsters") {
    Graph p5 = untyped_graph(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}});
    CHECK(is_valid(p5, Family::lobster));
    // caterpillar: path 1-2-3 with leaves on each spine node
    Graph cat = untyped_graph(6, {{1, 2}, {2, 3}, {1, 4}, {2, 5}, {3, 6}});
    CHECK(is_lobster(cat));
    // leaf-of-leaf-of-leaf off a path is not a lobster
    Graph deep =
        untyped_graph(7, {{1, 2}, {2, 3}, {3, 4}, {2, 5}, {5, 6}, {6, 7}});
    CHECK(!is_lobster(deep));
    // star is a lobster, cycle is not
    CHECK(is_lobster(untyped_graph(4, {{1, 2}, {1, 3}, {1, 4}})));
    CHECK(!is_lobster(untyped_graph(3, {{1, 2}, {2, 3}, {1, 3}})));
    CHECK(is_lobster(untyped_graph(1, {})));
    CHECK(is_lobster(untyped_graph(2, {{1, 2}})));
}

TEST_CASE("sbm test accepts block structure, rejects homogeneous graphs") {
    DatasetSpec spec;
    spec.family = Family::sbm;
    spec.blocks_min = spec.blocks_max = 2;
    spec.block_size_min = spec.block_size_max = 12;
    int accepted = 0;
    for (int trial = 0; trial < 6; ++trial)
        if (is_sbm_like(random_sbm(spec, 77 + trial))) accepted++;
    CHECK(accepted >= 5);

    // uniform random graphs have intra ~ inter; expect rejection mostly
    int rejected = 0;
    for (int trial = 0; trial < 6; ++trial) {
        Rng rng = make_rng(991 + trial);
        Graph g = untyped_graph(24, {});
        for (int u = 1; u <= 24; ++u)
            for (int v = u + 1; v <= 24; ++v)
                if (rand_unit(rng) < 0.18) g.add_edge(u, v);
        if (!is_sbm_like(g)) rejected++;
    }
    CHECK(rejected >= 5);

    // trees are far too sparse for the intra-density bar
    CHECK(!is_sbm_like(random_tree(20, 5)));
}

TEST_SUITE_END();
