#include "ggen/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ggen/errors.hpp"

namespace ggen {

void jacobi_eigen(Eigen::MatrixXd a, Eigen::VectorXd& eigenvalues,
                  Eigen::MatrixXd* eigenvectors_out, double tol) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd v;
    if (eigenvectors_out) v = Eigen::MatrixXd::Identity(n, n);

    auto off_norm = [&] {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() >= tol; ++sweep) {
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                if (eigenvectors_out) {
                    for (int k = 0; k < n; ++k) {
                        double vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
    eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) eigenvalues[i] = a(idx[i], idx[i]);
    if (eigenvectors_out) {
        eigenvectors_out->resize(n, n);
        for (int i = 0; i < n; ++i) eigenvectors_out->col(i) = v.col(idx[i]);
    }
}

Eigen::MatrixXd normalized_laplacian(const Graph& g) {
    const int n = g.n;
    std::vector<int> deg = g.degrees();
    std::vector<double> dinv(n + 1, 0.0);
    for (int i = 1; i <= n; ++i)
        if (deg[i] > 0) dinv[i] = 1.0 / std::sqrt(static_cast<double>(deg[i]));
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i <= n; ++i)
        if (deg[i] > 0) l(i - 1, i - 1) = 1.0;
    for (const Edge& e : g.edges) {
        double w = dinv[e.src] * dinv[e.dest];
        l(e.src - 1, e.dest - 1) -= w;
        l(e.dest - 1, e.src - 1) -= w;
    }
    return l;
}

std::vector<double> normalized_laplacian_eigenvalues(const Graph& g) {
    Eigen::VectorXd ev;
    jacobi_eigen(normalized_laplacian(g), ev, nullptr);
    return {ev.data(), ev.data() + ev.size()};
}

namespace {

// Triangle count per node; each triangle counted once per member.
std::vector<long long> triangles_per_node(const Graph& g,
                                          const std::vector<std::vector<std::pair<int, int>>>& adj) {
    std::vector<long long> tri(g.n + 1, 0);
    std::vector<char> is_nbr(g.n + 1, 0);
    for (const Edge& e : g.edges) {
        for (auto [w, t] : adj[e.src]) is_nbr[w] = 1;
        for (auto [w, t] : adj[e.dest]) {
            if (w > e.dest && is_nbr[w]) {
                tri[e.src]++;
                tri[e.dest]++;
                tri[w]++;
            }
        }
        for (auto [w, t] : adj[e.src]) is_nbr[w] = 0;
    }
    return tri;
}

struct EsuState {
    const std::vector<std::vector<int>>* adj;
    std::vector<char> in_sub;
    std::vector<int> adj_sub_count;  // #neighbors each node has inside sub
    std::vector<int> sub;
    int root = 0;
    std::vector<std::array<long long, kNumOrbits>>* counts;
    const std::vector<std::vector<char>>* adjmat;
};

void classify_quad(EsuState& st) {
    const auto& sub = st.sub;
    const auto& am = *st.adjmat;
    int wdeg[4] = {0, 0, 0, 0};
    int edges = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (am[sub[i]][sub[j]]) {
                wdeg[i]++;
                wdeg[j]++;
                edges++;
            }
    auto& counts = *st.counts;
    switch (edges) {
        case 3: {
            bool star = false;
            for (int i = 0; i < 4; ++i) star |= (wdeg[i] == 3);
            for (int i = 0; i < 4; ++i) {
                if (star)
                    counts[sub[i]][wdeg[i] == 3 ? 7 : 6]++;
                else
                    counts[sub[i]][wdeg[i] == 1 ? 4 : 5]++;
            }
            break;
        }
        case 4: {
            bool paw = false;
            for (int i = 0; i < 4; ++i) paw |= (wdeg[i] == 3);
            for (int i = 0; i < 4; ++i) {
                if (paw)
                    counts[sub[i]][wdeg[i] == 1 ? 9 : (wdeg[i] == 2 ? 10 : 11)]++;
                else
                    counts[sub[i]][8]++;
            }
            break;
        }
        case 5:
            for (int i = 0; i < 4; ++i) counts[sub[i]][wdeg[i] == 2 ? 12 : 13]++;
            break;
        case 6:
            for (int i = 0; i < 4; ++i) counts[sub[i]][14]++;
            break;
        default:
            break;  // ESU yields connected subgraphs; < 3 edges cannot happen
    }
}

void esu_extend(EsuState& st, std::vector<int> ext) {
    if (static_cast<int>(st.sub.size()) == 4) {
        classify_quad(st);
        return;
    }
    while (!ext.empty()) {
        int w = ext.back();
        ext.pop_back();
        std::vector<int> next = ext;
        for (int u : (*st.adj)[w])
            if (u > st.root && !st.in_sub[u] && st.adj_sub_count[u] == 0) next.push_back(u);
        st.in_sub[w] = 1;
        for (int u : (*st.adj)[w]) st.adj_sub_count[u]++;
        st.sub.push_back(w);
        esu_extend(st, std::move(next));
        st.sub.pop_back();
        st.in_sub[w] = 0;
        for (int u : (*st.adj)[w]) st.adj_sub_count[u]--;
    }
}

}  // namespace

std::vector<std::array<long long, kNumOrbits>> orbit_counts(const Graph& g) {
    const int n = g.n;
    auto adj_typed = g.adjacency();
    std::vector<std::vector<int>> adj(n + 1);
    for (int i = 1; i <= n; ++i)
        for (auto [j, t] : adj_typed[i]) adj[i].push_back(j);
    std::vector<std::vector<char>> am(n + 1, std::vector<char>(n + 1, 0));
    for (const Edge& e : g.edges) am[e.src][e.dest] = am[e.dest][e.src] = 1;

    std::vector<std::array<long long, kNumOrbits>> counts(
        n + 1, std::array<long long, kNumOrbits>{});

    std::vector<int> deg(n + 1);
    for (int i = 1; i <= n; ++i) deg[i] = static_cast<int>(adj[i].size());
    std::vector<long long> tri = triangles_per_node(g, adj_typed);

    for (int i = 1; i <= n; ++i) {
        counts[i][0] = deg[i];
        counts[i][3] = tri[i];
        counts[i][2] = static_cast<long long>(deg[i]) * (deg[i] - 1) / 2 - tri[i];
        long long ends = 0;
        for (int j : adj[i]) ends += deg[j] - 1;
        counts[i][1] = ends - 2 * tri[i];
    }

    EsuState st;
    st.adj = &adj;
    st.adjmat = &am;
    st.counts = &counts;
    st.in_sub.assign(n + 1, 0);
    st.adj_sub_count.assign(n + 1, 0);
    for (int v = 1; v <= n; ++v) {
        st.root = v;
        st.sub = {v};
        st.in_sub[v] = 1;
        for (int u : adj[v]) st.adj_sub_count[u]++;
        std::vector<int> ext;
        for (int u : adj[v])
            if (u > v) ext.push_back(u);
        esu_extend(st, std::move(ext));
        st.in_sub[v] = 0;
        for (int u : adj[v]) st.adj_sub_count[u]--;
    }
    return counts;
}

std::vector<double> clustering_coefficients(const Graph& g) {
    auto adj = g.adjacency();
    std::vector<long long> tri = triangles_per_node(g, adj);
    std::vector<int> deg = g.degrees();
    std::vector<double> c(g.n);
    for (int i = 1; i <= g.n; ++i) {
        if (deg[i] < 2)
            c[i - 1] = 0.0;
        else
            c[i - 1] = 2.0 * static_cast<double>(tri[i]) /
                       (static_cast<double>(deg[i]) * (deg[i] - 1));
    }
    return c;
}

GraphStatistics compute_statistics(const Graph& g) {
    if (g.n < 1) throw DataError("compute_statistics: empty graph");
    GraphStatistics s;

    std::vector<int> deg = g.degrees();
    int max_deg = 0;
    for (int i = 1; i <= g.n; ++i) max_deg = std::max(max_deg, deg[i]);
    s.degree_hist.assign(max_deg + 1, 0.0);
    for (int i = 1; i <= g.n; ++i) s.degree_hist[deg[i]] += 1.0;
    for (double& x : s.degree_hist) x /= g.n;

    s.clustering_hist.assign(kClusteringBins, 0.0);
    for (double c : clustering_coefficients(g)) {
        int bin = std::min(kClusteringBins - 1, static_cast<int>(c * kClusteringBins));
        s.clustering_hist[bin] += 1.0;
    }
    for (double& x : s.clustering_hist) x /= g.n;

    auto orbits = orbit_counts(g);
    s.orbit_hist.assign(kNumOrbits, 0.0);
    long long total = 0;
    for (int i = 1; i <= g.n; ++i)
        for (int o = 0; o < kNumOrbits; ++o) {
            s.orbit_hist[o] += static_cast<double>(orbits[i][o]);
            total += orbits[i][o];
        }
    if (total > 0)
        for (double& x : s.orbit_hist) x /= static_cast<double>(total);

    s.spectrum_hist.assign(kSpectrumBins, 0.0);
    for (double ev : normalized_laplacian_eigenvalues(g)) {
        double lam = std::clamp(ev, 0.0, 2.0);
        int bin = std::min(kSpectrumBins - 1, static_cast<int>(lam / 2.0 * kSpectrumBins));
        s.spectrum_hist[bin] += 1.0;
    }
    for (double& x : s.spectrum_hist) x /= g.n;

    return s;
}

}  // namespace ggen
