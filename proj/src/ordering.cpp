#include "ggen/ordering.hpp"

#include <algorithm>
#include <functional>

#include "ggen/errors.hpp"
#include "ggen/rng.hpp"

namespace ggen {

OrderPolicy policy_from_string(const std::string& s) {
    if (s == "degree") return OrderPolicy::degree;
    if (s == "bfs") return OrderPolicy::bfs;
    if (s == "dfs") return OrderPolicy::dfs;
    if (s == "uniform") return OrderPolicy::uniform;
    throw ConfigError("unknown ordering policy: " + s);
}

std::string to_string(OrderPolicy p) {
    switch (p) {
        case OrderPolicy::degree: return "degree";
        case OrderPolicy::bfs: return "bfs";
        case OrderPolicy::dfs: return "dfs";
        case OrderPolicy::uniform: return "uniform";
    }
    return "?";
}

namespace {

int pick_uniform(const std::vector<int>& candidates, Rng& rng) {
    return candidates[rng() % candidates.size()];
}

// Adjacency with a per-node uniformly shuffled neighbor iteration order.
std::vector<std::vector<int>> shuffled_adjacency(const Graph& g, Rng& rng) {
    std::vector<std::vector<int>> adj(g.n + 1);
    for (const Edge& e : g.edges) {
        adj[e.src].push_back(e.dest);
        adj[e.dest].push_back(e.src);
    }
    for (int i = 1; i <= g.n; ++i) shuffle_vec(adj[i], rng);
    return adj;
}

}  // namespace

EdgeOrder order_degree(const Graph& g, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<int> deg = g.degrees();
    std::vector<std::vector<int>> adj(g.n + 1);
    for (const Edge& e : g.edges) {
        adj[e.src].push_back(e.dest);
        adj[e.dest].push_back(e.src);
    }
    std::vector<std::vector<char>> alive(g.n + 1, std::vector<char>(g.n + 1, 0));
    for (const Edge& e : g.edges) alive[e.src][e.dest] = alive[e.dest][e.src] = 1;

    EdgeOrder order;
    order.policy = OrderPolicy::degree;
    order.seed = seed;
    int remaining = g.m();
    std::vector<int> cands;
    while (remaining > 0) {
        int min_deg = g.n + 1;
        for (int i = 1; i <= g.n; ++i)
            if (deg[i] >= 1) min_deg = std::min(min_deg, deg[i]);
        cands.clear();
        for (int i = 1; i <= g.n; ++i)
            if (deg[i] == min_deg) cands.push_back(i);
        int src = pick_uniform(cands, rng);

        int min_nbr = g.n + 1;
        for (int j : adj[src])
            if (alive[src][j]) min_nbr = std::min(min_nbr, deg[j]);
        cands.clear();
        for (int j : adj[src])
            if (alive[src][j] && deg[j] == min_nbr) cands.push_back(j);
        std::sort(cands.begin(), cands.end());  // adjacency order is arbitrary; fix before draw
        int dest = pick_uniform(cands, rng);

        alive[src][dest] = alive[dest][src] = 0;
        deg[src]--;
        deg[dest]--;
        remaining--;
        order.edges.push_back({src, dest});
    }
    std::reverse(order.edges.begin(), order.edges.end());
    return order;
}

namespace {

EdgeOrder order_traversal(const Graph& g, std::uint64_t seed, bool bfs) {
    Rng rng = make_rng(seed);
    auto adj = shuffled_adjacency(g, rng);
    std::vector<char> visited(g.n + 1, 0);
    std::vector<std::vector<char>> emitted(g.n + 1, std::vector<char>(g.n + 1, 0));
    EdgeOrder order;
    order.policy = bfs ? OrderPolicy::bfs : OrderPolicy::dfs;
    order.seed = seed;

    auto emit = [&](int u, int v) {
        if (emitted[u][v]) return;
        emitted[u][v] = emitted[v][u] = 1;
        order.edges.push_back({u, v});
    };

    std::function<void(int)> dfs_helper = [&](int v) {
        for (int w : adj[v]) {
            if (!visited[w]) {
                emit(v, w);
                visited[w] = 1;
                dfs_helper(w);
            } else {
                emit(v, w);
            }
        }
    };

    auto bfs_from = [&](int start) {
        std::vector<int> queue{start};
        std::size_t head = 0;
        while (head < queue.size()) {
            int v = queue[head++];
            for (int w : adj[v]) {
                if (!visited[w]) {
                    visited[w] = 1;
                    emit(v, w);
                    queue.push_back(w);
                } else {
                    emit(v, w);
                }
            }
        }
    };

    // Start nodes drawn at random; remaining components restarted the same way.
    std::vector<int> starts(g.n);
    for (int i = 0; i < g.n; ++i) starts[i] = i + 1;
    shuffle_vec(starts, rng);
    for (int s : starts) {
        if (visited[s]) continue;
        visited[s] = 1;
        if (bfs)
            bfs_from(s);
        else
            dfs_helper(s);
    }
    return order;
}

}  // namespace

EdgeOrder order_bfs(const Graph& g, std::uint64_t seed) { return order_traversal(g, seed, true); }

EdgeOrder order_dfs(const Graph& g, std::uint64_t seed) { return order_traversal(g, seed, false); }

EdgeOrder order_uniform(const Graph& g, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    EdgeOrder order;
    order.policy = OrderPolicy::uniform;
    order.seed = seed;
    for (const Edge& e : g.edges) order.edges.push_back({e.src, e.dest});
    shuffle_vec(order.edges, rng);
    return order;
}

EdgeOrder order_edges(const Graph& g, OrderPolicy policy, std::uint64_t seed) {
    switch (policy) {
        case OrderPolicy::degree: return order_degree(g, seed);
        case OrderPolicy::bfs: return order_bfs(g, seed);
        case OrderPolicy::dfs: return order_dfs(g, seed);
        case OrderPolicy::uniform: return order_uniform(g, seed);
    }
    throw ConfigError("bad ordering policy");
}

std::vector<int> order_nodes(const Graph& g, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<int> perm(g.n);
    for (int i = 0; i < g.n; ++i) perm[i] = i + 1;
    shuffle_vec(perm, rng);
    return perm;
}

}  // namespace ggen
