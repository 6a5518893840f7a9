#include "doctest.h"

#include "ggen/errors.hpp"
#include "ggen/graph.hpp"
#include "ggen/rng.hpp"

using namespace ggen;

TEST_SUITE_BEGIN("graph");

TEST_CASE("edges stored canonically") {
    Graph g = untyped_graph(4, {{3, 1}, {2, 4}});
    CHECK(g.edges[0].src == 1);
    CHECK(g.edges[0].dest == 3);
    CHECK(g.has_edge(4, 2));
    CHECK(!g.has_edge(1, 2));
    CHECK(!g.add_edge(2, 2));  // self-loop
    CHECK(!g.add_edge(1, 3));  // duplicate
    CHECK(g.add_edge(1, 2));
    g.validate();
}

TEST_CASE("validate rejects malformed graphs") {
    Graph g = untyped_graph(3, {{1, 2}});
    g.edges.push_back({2, 2, 1});
    CHECK_THROWS_AS(g.validate(), DataError);

    Graph h = untyped_graph(2, {{1, 2}});
    h.node_types[0] = 7;  // k_v is 1
    CHECK_THROWS_AS(h.validate(), DataError);

    Graph q = untyped_graph(2, {{1, 2}});
    q.edges.push_back({1, 5, 1});
    CHECK_THROWS_AS(q.validate(), DataError);
}

TEST_CASE("file format round trip") {
    Graph g1 = untyped_graph(3, {{1, 2}, {2, 3}});
    Graph g2;
    g2.n = 2;
    g2.k_v = 3;
    g2.k_e = 2;
    g2.node_types = {2, 3};
    g2.edges = {{1, 2, 2}};

    std::string text = format_graphs({g1, g2});
    auto parsed = parse_graphs(text);
    REQUIRE(parsed.size() == 2);
    CHECK(same_graph(parsed[0].graph, g1));
    CHECK(same_graph(parsed[1].graph, g2));
    CHECK(parsed[1].graph.k_v == 3);
    CHECK(!parsed[0].label.has_value());
}

TEST_CASE("labeled blocks carry y records") {
    Graph g = untyped_graph(2, {{1, 2}});
    std::string text = format_labeled_graphs({{g, 4}, {g, std::nullopt}});
    auto parsed = parse_graphs(text);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].label == 4);
    CHECK(!parsed[1].label.has_value());
}

TEST_CASE("parse rejects bad input") {
    CHECK_THROWS_AS(parse_graphs("g 2 1 1 1\nv 1 1\nv 2 1\n"), DataError);  // missing edge
    CHECK_THROWS_AS(parse_graphs("v 1 1\n"), DataError);                    // node before header
    CHECK_THROWS_AS(parse_graphs("g 1 0 1 1\nz 1\n"), DataError);           // unknown record
}

TEST_CASE("relabel permutes structure") {
    Graph g;
    g.n = 3;
    g.k_v = 2;
    g.node_types = {1, 2, 1};
    g.edges = {{1, 2, 1}};
    Graph r = relabel(g, {3, 1, 2});  // old 3 -> new 1, old 1 -> new 2, old 2 -> new 3
    CHECK(r.node_types == std::vector<int>{1, 1, 2});
    REQUIRE(r.m() == 1);
    CHECK(r.edges[0] == Edge{2, 3, 1});
}

TEST_SUITE_END();
