#include "ggen/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ggen/errors.hpp"

namespace ggen {

bool Graph::add_edge(int u, int v, int etype) {
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    if (has_edge(u, v)) return false;
    edges.push_back({u, v, etype});
    sort_edges();
    return true;
}

bool Graph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    for (const Edge& e : edges)
        if (e.src == u && e.dest == v) return true;
    return false;
}

void Graph::sort_edges() { std::sort(edges.begin(), edges.end()); }

void Graph::validate() const {
    if (n < 0) throw DataError("graph: negative node count");
    if (static_cast<int>(node_types.size()) != n)
        throw DataError("graph: node_types length != n");
    for (int t : node_types)
        if (t < 1 || t > k_v) throw DataError("graph: node type out of range");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (e.src == e.dest) throw DataError("graph: self-loop");
        if (e.src < 1 || e.dest < 1 || e.src > n || e.dest > n)
            throw DataError("graph: edge endpoint out of range");
        if (e.src > e.dest) throw DataError("graph: edge not canonical");
        if (e.etype < 1 || e.etype > k_e) throw DataError("graph: edge type out of range");
        if (i > 0 && edges[i - 1].src == e.src && edges[i - 1].dest == e.dest)
            throw DataError("graph: duplicate edge");
    }
    if (!std::is_sorted(edges.begin(), edges.end()))
        throw DataError("graph: edges not sorted");
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(n + 1, 0);
    for (const Edge& e : edges) {
        deg[e.src]++;
        deg[e.dest]++;
    }
    return deg;
}

std::vector<std::vector<std::pair<int, int>>> Graph::adjacency() const {
    std::vector<std::vector<std::pair<int, int>>> adj(n + 1);
    for (const Edge& e : edges) {
        adj[e.src].push_back({e.dest, e.etype});
        adj[e.dest].push_back({e.src, e.etype});
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
}

bool same_graph(const Graph& a, const Graph& b) {
    return a.n == b.n && a.node_types == b.node_types && a.edges == b.edges;
}

Graph untyped_graph(int n, const std::vector<std::pair<int, int>>& edges) {
    Graph g;
    g.n = n;
    g.node_types.assign(n, 1);
    for (auto [u, v] : edges) {
        if (u > v) std::swap(u, v);
        g.edges.push_back({u, v, 1});
    }
    g.sort_edges();
    return g;
}

Graph relabel(const Graph& g, const std::vector<int>& order) {
    std::vector<int> new_id(g.n + 1, 0);
    for (int k = 0; k < g.n; ++k) new_id[order[k]] = k + 1;
    Graph out;
    out.n = g.n;
    out.k_v = g.k_v;
    out.k_e = g.k_e;
    out.node_types.resize(g.n);
    for (int k = 0; k < g.n; ++k) out.node_types[k] = g.node_types[order[k] - 1];
    out.edges.reserve(g.edges.size());
    for (const Edge& e : g.edges) {
        int u = new_id[e.src], v = new_id[e.dest];
        if (u > v) std::swap(u, v);
        out.edges.push_back({u, v, e.etype});
    }
    out.sort_edges();
    return out;
}

std::string format_labeled_graphs(const std::vector<LabeledGraph>& graphs) {
    std::ostringstream os;
    bool first = true;
    for (const LabeledGraph& lg : graphs) {
        if (!first) os << "\n";
        first = false;
        const Graph& g = lg.graph;
        os << "g " << g.n << " " << g.m() << " " << g.k_v << " " << g.k_e << "\n";
        if (lg.label) os << "y " << *lg.label << "\n";
        for (int i = 1; i <= g.n; ++i) os << "v " << i << " " << g.node_types[i - 1] << "\n";
        for (const Edge& e : g.edges)
            os << "e " << e.src << " " << e.dest << " " << e.etype << "\n";
    }
    return os.str();
}

std::string format_graphs(const std::vector<Graph>& graphs) {
    std::vector<LabeledGraph> lg;
    lg.reserve(graphs.size());
    for (const Graph& g : graphs) lg.push_back({g, std::nullopt});
    return format_labeled_graphs(lg);
}

std::vector<LabeledGraph> parse_graphs(const std::string& text) {
    std::vector<LabeledGraph> out;
    std::istringstream is(text);
    std::string line;
    LabeledGraph cur;
    bool in_block = false;
    int expected_m = 0;
    int line_no = 0;

    auto finish = [&] {
        if (!in_block) return;
        if (cur.graph.m() != expected_m)
            throw DataError("graph file: edge count mismatch in block ending before line " +
                            std::to_string(line_no));
        cur.graph.sort_edges();
        cur.graph.validate();
        out.push_back(std::move(cur));
        cur = {};
        in_block = false;
    };

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            finish();
            continue;
        }
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "g") {
            finish();
            int n, m, kv, ke;
            if (!(ls >> n >> m >> kv >> ke))
                throw DataError("graph file: bad header at line " + std::to_string(line_no));
            cur.graph.n = n;
            cur.graph.k_v = kv;
            cur.graph.k_e = ke;
            cur.graph.node_types.assign(n, 0);
            expected_m = m;
            in_block = true;
        } else if (tag == "v") {
            int id, type;
            if (!in_block || !(ls >> id >> type) || id < 1 || id > cur.graph.n)
                throw DataError("graph file: bad node line at line " + std::to_string(line_no));
            cur.graph.node_types[id - 1] = type;
        } else if (tag == "e") {
            int u, v, t;
            if (!in_block || !(ls >> u >> v >> t))
                throw DataError("graph file: bad edge line at line " + std::to_string(line_no));
            if (u > v) std::swap(u, v);
            cur.graph.edges.push_back({u, v, t});
        } else if (tag == "y") {
            int y;
            if (!in_block || !(ls >> y))
                throw DataError("graph file: bad label line at line " + std::to_string(line_no));
            cur.label = y;
        } else {
            throw DataError("graph file: unknown record '" + tag + "' at line " +
                            std::to_string(line_no));
        }
    }
    finish();
    return out;
}

void write_labeled_graph_file(const std::string& path, const std::vector<LabeledGraph>& graphs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << format_labeled_graphs(graphs);
    if (!f) throw DataError("write failed: " + path);
}

void write_graph_file(const std::string& path, const std::vector<Graph>& graphs) {
    std::vector<LabeledGraph> lg;
    lg.reserve(graphs.size());
    for (const Graph& g : graphs) lg.push_back({g, std::nullopt});
    write_labeled_graph_file(path, lg);
}

std::vector<LabeledGraph> read_labeled_graph_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_graphs(ss.str());
}

std::vector<Graph> read_graph_file(const std::string& path) {
    std::vector<Graph> out;
    for (auto& lg : read_labeled_graph_file(path)) out.push_back(std::move(lg.graph));
    return out;
}

}  // namespace ggen
