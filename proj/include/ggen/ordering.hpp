#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggen/graph.hpp"

namespace ggen {

enum class OrderPolicy { degree, bfs, dfs, uniform };

OrderPolicy policy_from_string(const std::string& s);
std::string to_string(OrderPolicy p);

// A permutation of the edge set. Pairs keep the orientation produced by the
// policy (for bfs/dfs, src is the node the edge was reached from; for the
// degree policy, src is the removal-time minimum-degree endpoint).
struct EdgeOrder {
    std::vector<std::pair<int, int>> edges;
    OrderPolicy policy = OrderPolicy::degree;
    std::uint64_t seed = 0;
};

// Reverse of the degree-based removal process: repeatedly remove an edge
// between a minimum-degree node (degree >= 1) and its minimum-degree
// neighbor, ties broken uniformly at random, then reverse the removal list.
EdgeOrder order_degree(const Graph& g, std::uint64_t seed);

// Traversal orders from a random start node, shuffled adjacency; non-tree
// edges appended when first encountered from a visited endpoint. Components
// beyond the first are traversed from fresh random start nodes.
EdgeOrder order_bfs(const Graph& g, std::uint64_t seed);
EdgeOrder order_dfs(const Graph& g, std::uint64_t seed);

EdgeOrder order_uniform(const Graph& g, std::uint64_t seed);

EdgeOrder order_edges(const Graph& g, OrderPolicy policy, std::uint64_t seed);

// Uniformly random node permutation; order[k] is the original id that
// receives new id k+1 (relabel() applies it).
std::vector<int> order_nodes(const Graph& g, std::uint64_t seed);

}  // namespace ggen
