#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ggen {

// Undirected typed edge, stored canonically with src < dest.
struct Edge {
    int src = 0;
    int dest = 0;
    int etype = 1;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Labeled undirected simple graph. Node ids are 1-based; node i has type
// node_types[i-1] in [1, k_v]; edge types in [1, k_e]. No self-loops, no
// duplicate node pairs.
struct Graph {
    int n = 0;
    std::vector<int> node_types;
    std::vector<Edge> edges;  // kept sorted, src < dest
    int k_v = 1;
    int k_e = 1;

    int m() const { return static_cast<int>(edges.size()); }

    // Inserts (u, v) canonically; returns false on self-loop/duplicate.
    bool add_edge(int u, int v, int etype = 1);
    bool has_edge(int u, int v) const;
    void sort_edges();

    // Throws DataError if any invariant is violated.
    void validate() const;

    std::vector<int> degrees() const;
    // adj[u] = list of (neighbor, etype), u in [1, n]; neighbor lists sorted.
    std::vector<std::vector<std::pair<int, int>>> adjacency() const;
};

// Structural equality: same n, same types, same canonical edge set
// (ignores the declared k_v/k_e bounds).
bool same_graph(const Graph& a, const Graph& b);

Graph untyped_graph(int n, const std::vector<std::pair<int, int>>& edges);

// Builds the graph with node i renamed to new_id where order[k] is the
// original id assigned new id k+1.
Graph relabel(const Graph& g, const std::vector<int>& order);

// --- text format ---
// Block per graph: "g <n> <m> <K_v> <K_e>", n lines "v <id> <type>",
// m lines "e <src> <dest> <type>", optional "y <label>", blank line between
// blocks. 1-based ids, LF endings.
struct LabeledGraph {
    Graph graph;
    std::optional<int> label;
};

std::string format_graphs(const std::vector<Graph>& graphs);
std::string format_labeled_graphs(const std::vector<LabeledGraph>& graphs);
std::vector<LabeledGraph> parse_graphs(const std::string& text);

void write_graph_file(const std::string& path, const std::vector<Graph>& graphs);
void write_labeled_graph_file(const std::string& path, const std::vector<LabeledGraph>& graphs);
std::vector<Graph> read_graph_file(const std::string& path);
std::vector<LabeledGraph> read_labeled_graph_file(const std::string& path);

}  // namespace ggen
