#include "ggen/iso.hpp"

#include <algorithm>
#include <map>

#include "ggen/rng.hpp"

namespace ggen {

namespace {

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t x) {
    return splitmix64(h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

}  // namespace

std::vector<std::uint64_t> wl_colors(const Graph& g) {
    const int n = g.n;
    auto adj = g.adjacency();
    std::vector<std::uint64_t> color(n + 1, 0);
    for (int i = 1; i <= n; ++i)
        color[i] = splitmix64(0xC0100128ULL + static_cast<std::uint64_t>(g.node_types[i - 1]));

    auto partition_size = [&] {
        std::vector<std::uint64_t> s(color.begin() + 1, color.end());
        std::sort(s.begin(), s.end());
        return std::unique(s.begin(), s.end()) - s.begin();
    };

    long prev_classes = partition_size();
    for (int round = 0; round < n; ++round) {
        std::vector<std::uint64_t> next(n + 1, 0);
        for (int i = 1; i <= n; ++i) {
            std::vector<std::uint64_t> sig;
            sig.reserve(adj[i].size());
            for (auto [j, t] : adj[i])
                sig.push_back(hash_combine(static_cast<std::uint64_t>(t), color[j]));
            std::sort(sig.begin(), sig.end());
            std::uint64_t h = hash_combine(0x31f1ULL, color[i]);
            for (std::uint64_t s : sig) h = hash_combine(h, s);
            next[i] = h;
        }
        color = std::move(next);
        long classes = partition_size();
        if (classes == prev_classes) break;
        prev_classes = classes;
    }
    return color;
}

std::uint64_t wl_hash(const Graph& g) {
    std::vector<std::uint64_t> color = wl_colors(g);
    std::sort(color.begin() + 1, color.end());
    std::uint64_t h = hash_combine(static_cast<std::uint64_t>(g.n),
                                   static_cast<std::uint64_t>(g.m()));
    for (int i = 1; i <= g.n; ++i) h = hash_combine(h, color[i]);
    return h;
}

namespace {

struct IsoSearch {
    const Graph *g1, *g2;
    std::vector<std::vector<std::pair<int, int>>> adj1, adj2;
    std::vector<std::vector<int>> et1, et2;  // adjacency matrix of edge types, 0 = none
    std::vector<std::uint64_t> c1, c2;
    std::vector<int> map12, map21;
    std::vector<int> order;  // g1 nodes in assignment order

    bool extend(std::size_t pos) {
        if (pos == order.size()) return true;
        int u = order[pos];
        for (int v = 1; v <= g2->n; ++v) {
            if (map21[v] != 0 || c2[v] != c1[u]) continue;
            bool ok = true;
            for (auto [w, t] : adj1[u]) {
                int mw = map12[w];
                if (mw != 0 && et2[v][mw] != t) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                // mapped neighbors of v must all be images of u's neighbors
                for (auto [w2, t] : adj2[v]) {
                    int pre = map21[w2];
                    if (pre != 0 && et1[u][pre] != t) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;
            map12[u] = v;
            map21[v] = u;
            if (extend(pos + 1)) return true;
            map12[u] = 0;
            map21[v] = 0;
        }
        return false;
    }
};

}  // namespace

bool isomorphic(const Graph& g1, const Graph& g2) {
    if (g1.n != g2.n || g1.m() != g2.m()) return false;
    if (g1.n == 0) return true;
    {
        std::vector<int> d1 = g1.degrees(), d2 = g2.degrees();
        std::sort(d1.begin(), d1.end());
        std::sort(d2.begin(), d2.end());
        if (d1 != d2) return false;
    }
    std::vector<std::uint64_t> c1 = wl_colors(g1), c2 = wl_colors(g2);
    {
        std::vector<std::uint64_t> s1(c1.begin() + 1, c1.end());
        std::vector<std::uint64_t> s2(c2.begin() + 1, c2.end());
        std::sort(s1.begin(), s1.end());
        std::sort(s2.begin(), s2.end());
        if (s1 != s2) return false;
    }

    IsoSearch s;
    s.g1 = &g1;
    s.g2 = &g2;
    s.adj1 = g1.adjacency();
    s.adj2 = g2.adjacency();
    s.c1 = std::move(c1);
    s.c2 = std::move(c2);
    s.et1.assign(g1.n + 1, std::vector<int>(g1.n + 1, 0));
    for (const Edge& e : g1.edges) s.et1[e.src][e.dest] = s.et1[e.dest][e.src] = e.etype;
    s.et2.assign(g2.n + 1, std::vector<int>(g2.n + 1, 0));
    for (const Edge& e : g2.edges) s.et2[e.src][e.dest] = s.et2[e.dest][e.src] = e.etype;
    s.map12.assign(g1.n + 1, 0);
    s.map21.assign(g2.n + 1, 0);

    // Assign rare colors first, preferring nodes adjacent to already-ordered
    // ones so partial maps are constrained early.
    std::map<std::uint64_t, int> class_size;
    for (int i = 1; i <= g1.n; ++i) class_size[s.c1[i]]++;
    std::vector<char> placed(g1.n + 1, 0);
    std::vector<int> deg = g1.degrees();
    for (int step = 0; step < g1.n; ++step) {
        int best = 0;
        bool best_adjacent = false;
        for (int i = 1; i <= g1.n; ++i) {
            if (placed[i]) continue;
            bool adjacent = false;
            for (auto [j, t] : s.adj1[i])
                if (placed[j]) {
                    adjacent = true;
                    break;
                }
            auto better = [&] {
                if (best == 0) return true;
                if (adjacent != best_adjacent) return adjacent;
                if (class_size[s.c1[i]] != class_size[s.c1[best]])
                    return class_size[s.c1[i]] < class_size[s.c1[best]];
                return deg[i] > deg[best];
            };
            if (better()) {
                best = i;
                best_adjacent = adjacent;
            }
        }
        placed[best] = 1;
        s.order.push_back(best);
    }
    return s.extend(0);
}

}  // namespace ggen
