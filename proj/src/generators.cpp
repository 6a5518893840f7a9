#include "ggen/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ggen/errors.hpp"
#include "ggen/rng.hpp"

namespace ggen {

void DatasetSpec::validate() const {
    if (count < 1) throw ConfigError("dataset: count must be positive");
    if (family == Family::planar && n_min < 3)
        throw ConfigError("dataset: planar requires n >= 3");
    if (family == Family::tree && n_min < 1)
        throw ConfigError("dataset: tree requires n >= 1");
    if (n_min > n_max) throw ConfigError("dataset: n_min > n_max");
    if (family == Family::lobster && (p1 < 0 || p1 >= 1 || p2 < 0 || p2 >= 1))
        throw ConfigError("dataset: lobster probabilities must lie in [0,1)");
    if (family == Family::sbm) {
        if (blocks_min < 2 || blocks_max > 5 || blocks_min > blocks_max)
            throw ConfigError("dataset: sbm blocks must lie in [2,5]");
        if (block_size_min < 10 || block_size_max > 40 || block_size_min > block_size_max)
            throw ConfigError("dataset: sbm block size must lie in [10,40]");
        if (p_intra <= 0 || p_intra > 1 || p_inter < 0 || p_inter > 1)
            throw ConfigError("dataset: sbm probabilities out of range");
    }
}

Graph random_tree(int n, std::uint64_t seed) {
    Graph g = untyped_graph(n, {});
    if (n == 1) return g;
    if (n == 2) {
        g.add_edge(1, 2);
        return g;
    }
    Rng rng = make_rng(seed);
    std::vector<int> pruefer(n - 2);
    for (int& x : pruefer) x = rand_int(rng, 1, n);

    std::vector<int> deg(n + 1, 1);
    for (int x : pruefer) deg[x]++;
    std::set<int> leaves;
    for (int i = 1; i <= n; ++i)
        if (deg[i] == 1) leaves.insert(i);
    for (int x : pruefer) {
        int leaf = *leaves.begin();
        leaves.erase(leaves.begin());
        g.edges.push_back({std::min(leaf, x), std::max(leaf, x), 1});
        if (--deg[x] == 1) leaves.insert(x);
    }
    int a = *leaves.begin(), b = *std::next(leaves.begin());
    g.edges.push_back({std::min(a, b), std::max(a, b), 1});
    g.sort_edges();
    return g;
}

namespace {

struct Tri {
    int a, b, c;  // point indices, CCW
};

double orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

// > 0 iff p lies strictly inside the circumcircle of CCW triangle (a, b, c).
double incircle(const std::vector<double>& xs, const std::vector<double>& ys, const Tri& t,
                double px, double py) {
    double adx = xs[t.a] - px, ady = ys[t.a] - py;
    double bdx = xs[t.b] - px, bdy = ys[t.b] - py;
    double cdx = xs[t.c] - px, cdy = ys[t.c] - py;
    double ad = adx * adx + ady * ady;
    double bd = bdx * bdx + bdy * bdy;
    double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
           ad * (bdx * cdy - bdy * cdx);
}

}  // namespace

Graph delaunay_planar(int n, std::uint64_t seed) {
    if (n < 3) throw ConfigError("delaunay: n must be >= 3");
    Rng rng = make_rng(seed);
    std::vector<double> xs(n + 3), ys(n + 3);
    for (int i = 0; i < n; ++i) {
        xs[i] = rand_unit(rng);
        ys[i] = rand_unit(rng);
    }
    // Bowyer-Watson with a super-triangle enclosing the unit square.
    xs[n] = -50.0;
    ys[n] = -50.0;
    xs[n + 1] = 50.0;
    ys[n + 1] = -50.0;
    xs[n + 2] = 0.5;
    ys[n + 2] = 80.0;
    std::vector<Tri> tris{{n, n + 1, n + 2}};

    for (int p = 0; p < n; ++p) {
        std::vector<Tri> keep;
        std::vector<std::pair<int, int>> boundary;
        auto toggle_edge = [&](int u, int v) {
            // cavity boundary = edges that appear exactly once among bad triangles
            auto key = std::minmax(u, v);
            for (std::size_t i = 0; i < boundary.size(); ++i) {
                auto k2 = std::minmax(boundary[i].first, boundary[i].second);
                if (k2 == key) {
                    boundary.erase(boundary.begin() + static_cast<long>(i));
                    return;
                }
            }
            boundary.push_back({u, v});
        };
        for (const Tri& t : tris) {
            if (incircle(xs, ys, t, xs[p], ys[p]) > 0) {
                toggle_edge(t.a, t.b);
                toggle_edge(t.b, t.c);
                toggle_edge(t.c, t.a);
            } else {
                keep.push_back(t);
            }
        }
        tris = std::move(keep);
        for (auto [u, v] : boundary) {
            Tri t{u, v, p};
            if (orient2d(xs[t.a], ys[t.a], xs[t.b], ys[t.b], xs[t.c], ys[t.c]) < 0)
                std::swap(t.b, t.c);
            tris.push_back(t);
        }
    }

    Graph g = untyped_graph(n, {});
    std::set<std::pair<int, int>> seen;
    auto add = [&](int u, int v) {
        if (u >= n || v >= n) return;
        auto key = std::minmax(u, v);
        if (seen.insert(key).second) g.edges.push_back({key.first + 1, key.second + 1, 1});
    };
    for (const Tri& t : tris) {
        add(t.a, t.b);
        add(t.b, t.c);
        add(t.c, t.a);
    }
    g.sort_edges();
    return g;
}

Graph random_lobster(const DatasetSpec& spec, std::uint64_t seed) {
    for (int attempt = 0;; ++attempt) {
        Rng rng = make_rng(mix_seed(seed, 0x10b57e5, attempt));
        int backbone = rand_int(rng, 2, std::max(2, spec.n_max / 3));
        std::vector<std::pair<int, int>> edges;
        int n = backbone;
        for (int i = 1; i < backbone; ++i) edges.push_back({i, i + 1});
        std::vector<int> level1;
        for (int i = 1; i <= backbone && n < spec.n_max; ++i) {
            while (n < spec.n_max && rand_unit(rng) < spec.p1) {
                edges.push_back({i, ++n});
                level1.push_back(n);
            }
        }
        for (int leaf : level1) {
            while (n < spec.n_max && rand_unit(rng) < spec.p2) edges.push_back({leaf, ++n});
        }
        if (n < spec.n_min) continue;
        Graph g = untyped_graph(n, edges);
        if (is_lobster(g)) return g;
    }
}

Graph random_sbm(const DatasetSpec& spec, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    int blocks = rand_int(rng, spec.blocks_min, spec.blocks_max);
    std::vector<int> sizes(blocks);
    int n = 0;
    for (int& s : sizes) {
        s = rand_int(rng, spec.block_size_min, spec.block_size_max);
        n += s;
    }
    // Contiguous block layout: block b covers ids (offset, offset + size].
    std::vector<int> block_of(n + 1, 0);
    int off = 0, b = 0;
    for (int s : sizes) {
        for (int i = 1; i <= s; ++i) block_of[off + i] = b;
        off += s;
        b++;
    }
    Graph g = untyped_graph(n, {});
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) {
            double p = block_of[u] == block_of[v] ? spec.p_intra : spec.p_inter;
            if (rand_unit(rng) < p) g.edges.push_back({u, v, 1});
        }
    g.sort_edges();
    return g;
}

std::vector<Graph> generate_dataset(const DatasetSpec& spec) {
    spec.validate();
    std::vector<Graph> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        Graph g;
        bool ok = false;
        for (int attempt = 0; attempt < 200; ++attempt) {
            std::uint64_t s = mix_seed(spec.seed, i, attempt);
            switch (spec.family) {
                case Family::tree: {
                    Rng r = make_rng(mix_seed(s, 1));
                    g = random_tree(rand_int(r, spec.n_min, spec.n_max), s);
                    break;
                }
                case Family::planar: {
                    Rng r = make_rng(mix_seed(s, 1));
                    g = delaunay_planar(rand_int(r, spec.n_min, spec.n_max), s);
                    break;
                }
                case Family::lobster:
                    g = random_lobster(spec, s);
                    break;
                case Family::sbm:
                    g = random_sbm(spec, s);
                    break;
            }
            if (is_valid(g, spec.family)) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw ConfigError("generate_dataset: could not produce a valid " +
                              to_string(spec.family) + " graph; check spec parameters");
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace ggen
