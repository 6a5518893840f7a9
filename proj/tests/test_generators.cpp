#include "doctest.h"

#include "ggen/errors.hpp"
#include "ggen/generators.hpp"
#include "ggen/validity.hpp"

using namespace ggen;

TEST_SUITE_BEGIN("generators");

TEST_CASE("the only tree on 2 nodes is the single edge") {
    DatasetSpec spec;
    spec.family = Family::tree;
    spec.count = 1;
    spec.n_min = spec.n_max = 2;
    spec.seed = 0;
    auto graphs = generate_dataset(spec);
    REQUIRE(graphs.size() == 1);
    CHECK(graphs[0].n == 2);
    REQUIRE(graphs[0].m() == 1);
    CHECK(graphs[0].edges[0] == Edge{1, 2, 1});
}

TEST_CASE("every planar sample passes the exact planarity test") {
    DatasetSpec spec;
    spec.family = Family::planar;
    spec.count = 100;
    spec.n_min = spec.n_max = 16;
    spec.seed = 7;
    auto graphs = generate_dataset(spec);
    REQUIRE(graphs.size() == 100);
    for (const Graph& g : graphs) {
        CHECK(g.n == 16);
        CHECK(is_planar(g));
        CHECK(is_connected(g));
        CHECK(g.m() <= 3 * g.n - 6);
        g.validate();
    }
}

TEST_CASE("sbm block densities land in the expected band") {
    DatasetSpec spec;
    spec.family = Family::sbm;
    spec.count = 10;
    spec.blocks_min = spec.blocks_max = 2;
    spec.block_size_min = spec.block_size_max = 10;
    spec.p_intra = 0.3;
    spec.p_inter = 0.05;
    spec.seed = 3;
    auto graphs = generate_dataset(spec);
    REQUIRE(graphs.size() == 10);
    for (const Graph& g : graphs) {
        REQUIRE(g.n == 20);
        // blocks are laid out contiguously: 1..10 and 11..20
        int intra = 0;
        for (const Edge& e : g.edges)
            if ((e.src <= 10) == (e.dest <= 10)) intra++;
        double density = intra / (2.0 * 45.0);
        CHECK(density >= 0.05);
        CHECK(density <= 0.6);
    }
}

TEST_CASE("trees are connected with m = n-1") {
    DatasetSpec spec;
    spec.family = Family::tree;
    spec.count = 50;
    spec.n_min = 4;
    spec.n_max = 12;
    spec.seed = 11;
    for (const Graph& g : generate_dataset(spec)) {
        CHECK(g.m() == g.n - 1);
        CHECK(is_connected(g));
    }
}

TEST_CASE("lobsters pass their validity test and stay in range") {
    DatasetSpec spec;
    spec.family = Family::lobster;
    spec.count = 30;
    spec.n_min = 8;
    spec.n_max = 20;
    spec.seed = 13;
    for (const Graph& g : generate_dataset(spec)) {
        CHECK(is_lobster(g));
        CHECK(g.n >= 8);
        CHECK(g.n <= 20);
    }
}

TEST_CASE("generation is deterministic in the seed") {
    DatasetSpec spec;
    spec.family = Family::planar;
    spec.count = 5;
    spec.n_min = 8;
    spec.n_max = 14;
    spec.seed = 21;
    auto a = generate_dataset(spec);
    auto b = generate_dataset(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_graph(a[i], b[i]));
    spec.seed = 22;
    auto c = generate_dataset(spec);
    bool all_same = true;
    for (std::size_t i = 0; i < a.size(); ++i) all_same &= same_graph(a[i], c[i]);
    CHECK(!all_same);
}

TEST_CASE("invalid specs are rejected") {
    DatasetSpec spec;
    spec.family = Family::planar;
    spec.n_min = 2;  // planar needs >= 3
    spec.n_max = 5;
    CHECK_THROWS_AS(generate_dataset(spec), ConfigError);
    spec = {};
    spec.count = 0;
    CHECK_THROWS_AS(generate_dataset(spec), ConfigError);
    spec = {};
    spec.family = Family::sbm;
    spec.blocks_min = 1;
    CHECK_THROWS_AS(generate_dataset(spec), ConfigError);
}

TEST_SUITE_END();
