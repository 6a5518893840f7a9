#include "ggen/validity.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include <algorithm>
#include <cmath>
#include <queue>

#include "ggen/errors.hpp"
#include "ggen/rng.hpp"
#include "ggen/stats.hpp"

namespace ggen {

Family family_from_string(const std::string& s) {
    if (s == "planar") return Family::planar;
    if (s == "tree") return Family::tree;
    if (s == "lobster") return Family::lobster;
    if (s == "sbm") return Family::sbm;
    throw ConfigError("unknown family: " + s);
}

std::string to_string(Family f) {
    switch (f) {
        case Family::planar: return "planar";
        case Family::tree: return "tree";
        case Family::lobster: return "lobster";
        case Family::sbm: return "sbm";
    }
    return "?";
}

bool is_connected(const Graph& g) {
    if (g.n == 0) return false;
    auto adj = g.adjacency();
    std::vector<char> seen(g.n + 1, 0);
    std::queue<int> q;
    q.push(1);
    seen[1] = 1;
    int found = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (auto [v, t] : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                found++;
                q.push(v);
            }
    }
    return found == g.n;
}

bool is_tree(const Graph& g) { return g.n >= 1 && g.m() == g.n - 1 && is_connected(g); }

bool is_planar(const Graph& g) {
    if (g.n <= 4) return true;  // K5 is the smallest non-planar graph
    using BoostGraph =
        boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    BoostGraph bg(g.n);
    for (const Edge& e : g.edges) boost::add_edge(e.src - 1, e.dest - 1, bg);
    return boost::boyer_myrvold_planarity_test(bg);
}

namespace {

// Removes all current leaves (degree-1 nodes); returns surviving node flags.
void strip_leaves(std::vector<int>& deg, std::vector<char>& alive,
                  const std::vector<std::vector<std::pair<int, int>>>& adj) {
    std::vector<int> leaves;
    for (std::size_t i = 1; i < deg.size(); ++i)
        if (alive[i] && deg[i] == 1) leaves.push_back(static_cast<int>(i));
    for (int u : leaves) {
        alive[u] = 0;
        deg[u] = 0;
        for (auto [v, t] : adj[u])
            if (alive[v] && deg[v] > 0) deg[v]--;
    }
}

}  // namespace

bool is_lobster(const Graph& g) {
    if (!is_tree(g)) return false;
    auto adj = g.adjacency();
    std::vector<int> deg = g.degrees();
    std::vector<char> alive(g.n + 1, 1);
    strip_leaves(deg, alive, adj);
    strip_leaves(deg, alive, adj);
    int remaining = 0;
    for (int i = 1; i <= g.n; ++i)
        if (alive[i]) {
            remaining++;
            if (deg[i] > 2) return false;
        }
    if (remaining == 0) return true;
    // Remaining nodes with degree <= 2 in a tree always form disjoint paths;
    // a path requires them to be connected: edges among survivors = remaining-1.
    int surv_edges = 0;
    for (const Edge& e : g.edges)
        if (alive[e.src] && alive[e.dest]) surv_edges++;
    return surv_edges == remaining - 1;
}

namespace {

// Lloyd k-means with k-means++ seeding; fixed internal seed keeps
// is_sbm_like a deterministic total function.
std::vector<int> kmeans(const Eigen::MatrixXd& pts, int k, std::uint64_t seed) {
    const int n = static_cast<int>(pts.rows());
    Rng rng = make_rng(seed);
    std::vector<int> centers_idx;
    centers_idx.push_back(rand_int(rng, 0, n - 1));
    std::vector<double> d2(n, 0.0);
    while (static_cast<int>(centers_idx.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = 1e300;
            for (int c : centers_idx)
                best = std::min(best, (pts.row(i) - pts.row(c)).squaredNorm());
            d2[i] = best;
            total += best;
        }
        int pick = 0;
        if (total <= 0) {
            pick = rand_int(rng, 0, n - 1);
        } else {
            double r = rand_unit(rng) * total, acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        centers_idx.push_back(pick);
    }
    Eigen::MatrixXd centers(k, pts.cols());
    for (int c = 0; c < k; ++c) centers.row(c) = pts.row(centers_idx[c]);

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = 1e300;
            for (int c = 0; c < k; ++c) {
                double d = (pts.row(i) - centers.row(c)).squaredNorm();
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        centers.setZero();
        std::vector<int> cnt(k, 0);
        for (int i = 0; i < n; ++i) {
            centers.row(assign[i]) += pts.row(i);
            cnt[assign[i]]++;
        }
        for (int c = 0; c < k; ++c)
            if (cnt[c] > 0) centers.row(c) /= cnt[c];
        if (!changed) break;
    }
    return assign;
}

struct Densities {
    double intra = 0.0;
    double inter = 0.0;
};

Densities partition_densities(const Graph& g, const std::vector<int>& assign, int k) {
    std::vector<long long> size(k, 0);
    for (int i = 0; i < g.n; ++i) size[assign[i]]++;
    long long intra_pairs = 0;
    for (int c = 0; c < k; ++c) intra_pairs += size[c] * (size[c] - 1) / 2;
    long long total_pairs = static_cast<long long>(g.n) * (g.n - 1) / 2;
    long long inter_pairs = total_pairs - intra_pairs;
    long long intra_edges = 0;
    for (const Edge& e : g.edges)
        if (assign[e.src - 1] == assign[e.dest - 1]) intra_edges++;
    long long inter_edges = g.m() - intra_edges;
    Densities d;
    d.intra = intra_pairs > 0 ? static_cast<double>(intra_edges) / intra_pairs : 0.0;
    d.inter = inter_pairs > 0 ? static_cast<double>(inter_edges) / inter_pairs : 0.0;
    return d;
}

}  // namespace

bool is_sbm_like(const Graph& g) {
    if (g.n < 8 || g.m() == 0) return false;
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    jacobi_eigen(normalized_laplacian(g), evals, &evecs);

    double best_score = -1e300;
    Densities best;
    for (int k = 2; k <= 5 && k < g.n; ++k) {
        Eigen::MatrixXd pts = evecs.leftCols(k);
        for (int i = 0; i < pts.rows(); ++i) {
            double norm = pts.row(i).norm();
            if (norm > 1e-12) pts.row(i) /= norm;
        }
        std::vector<int> assign = kmeans(pts, k, 0x5b5b5b5bULL + k);
        Densities d = partition_densities(g, assign, k);
        double score = d.intra - d.inter;
        if (score > best_score) {
            best_score = score;
            best = d;
        }
    }
    return best.intra >= 0.15 && best.inter <= 0.15;
}

bool is_valid(const Graph& g, Family family) {
    switch (family) {
        case Family::planar: return g.n >= 3 && is_planar(g);
        case Family::tree: return is_tree(g);
        case Family::lobster: return is_lobster(g);
        case Family::sbm: return is_sbm_like(g);
    }
    return false;
}

}  // namespace ggen
