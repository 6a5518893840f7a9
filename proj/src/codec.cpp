#include "ggen/codec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ggen/errors.hpp"
#include "ggen/rng.hpp"

namespace ggen {

std::string to_string(DecodeFailure f) {
    switch (f) {
        case DecodeFailure::none: return "none";
        case DecodeFailure::empty: return "empty";
        case DecodeFailure::missing_sog: return "missing_sog";
        case DecodeFailure::unexpected_token: return "unexpected_token";
        case DecodeFailure::index_mismatch: return "index_mismatch";
        case DecodeFailure::out_of_range: return "out_of_range";
        case DecodeFailure::self_loop: return "self_loop";
        case DecodeFailure::duplicate_edge: return "duplicate_edge";
        case DecodeFailure::trailing_tokens: return "trailing_tokens";
        case DecodeFailure::truncated: return "truncated";
    }
    return "?";
}

std::vector<SemanticToken> encode(const Graph& g, std::uint64_t node_seed,
                                  OrderPolicy edge_policy, std::uint64_t edge_seed) {
    Graph rg = relabel(g, order_nodes(g, node_seed));
    EdgeOrder order = order_edges(rg, edge_policy, edge_seed);
    bool keep_orientation =
        edge_policy == OrderPolicy::bfs || edge_policy == OrderPolicy::dfs;

    std::vector<SemanticToken> toks;
    toks.reserve(2 * rg.n + 3 * rg.m() + 3);
    toks.push_back(SemanticToken::sog());
    for (int i = 1; i <= rg.n; ++i) {
        toks.push_back(SemanticToken::node_type(rg.node_types[i - 1]));
        toks.push_back(SemanticToken::node_idx(i));
    }
    toks.push_back(SemanticToken::sep());
    for (auto [u, v] : order.edges) {
        if (!keep_orientation && u > v) std::swap(u, v);
        int lo = std::min(u, v), hi = std::max(u, v);
        int etype = 1;
        for (const Edge& e : rg.edges)
            if (e.src == lo && e.dest == hi) {
                etype = e.etype;
                break;
            }
        toks.push_back(SemanticToken::node_idx(u));
        toks.push_back(SemanticToken::node_idx(v));
        toks.push_back(SemanticToken::edge_type(etype));
    }
    toks.push_back(SemanticToken::eog());
    return toks;
}

GrammarState::GrammarState(const Vocabulary& v) : vocab_(v) {
    partner_count_.assign(v.n_max + 1, 0);
    pair_used_.assign(v.n_max + 1, std::vector<char>(v.n_max + 1, 0));
}

bool GrammarState::feed(const SemanticToken& tok) {
    auto die = [&](DecodeFailure f) {
        state_ = State::Dead;
        fail_ = f;
        return false;
    };
    switch (state_) {
        case State::Start:
            if (tok.kind != TokKind::SOG) return die(DecodeFailure::missing_sog);
            state_ = State::FirstNodeType;
            return true;
        case State::FirstNodeType:
        case State::AfterNodePair:
            if (tok.kind == TokKind::NodeType) {
                if (tok.value < 1 || tok.value > vocab_.k_v)
                    return die(DecodeFailure::out_of_range);
                if (n_ >= vocab_.n_max) return die(DecodeFailure::out_of_range);
                node_types_.push_back(tok.value);
                state_ = State::AfterNodeType;
                return true;
            }
            if (tok.kind == TokKind::SEP && state_ == State::AfterNodePair) {
                state_ = State::EdgeBoundary;
                return true;
            }
            return die(DecodeFailure::unexpected_token);
        case State::AfterNodeType:
            if (tok.kind != TokKind::NodeIdx) return die(DecodeFailure::unexpected_token);
            if (tok.value != n_ + 1) return die(DecodeFailure::index_mismatch);
            n_++;
            state_ = State::AfterNodePair;
            return true;
        case State::EdgeBoundary:
            if (tok.kind == TokKind::EOG) {
                state_ = State::Done;
                return true;
            }
            if (tok.kind != TokKind::NodeIdx) return die(DecodeFailure::unexpected_token);
            if (tok.value < 1 || tok.value > n_) return die(DecodeFailure::out_of_range);
            src_ = tok.value;
            state_ = State::AfterSrc;
            return true;
        case State::AfterSrc:
            if (tok.kind != TokKind::NodeIdx) return die(DecodeFailure::unexpected_token);
            if (tok.value < 1 || tok.value > n_) return die(DecodeFailure::out_of_range);
            if (tok.value == src_) return die(DecodeFailure::self_loop);
            if (pair_used_[src_][tok.value]) return die(DecodeFailure::duplicate_edge);
            dest_ = tok.value;
            state_ = State::AfterDest;
            return true;
        case State::AfterDest: {
            if (tok.kind != TokKind::EdgeType) return die(DecodeFailure::unexpected_token);
            if (tok.value < 1 || tok.value > vocab_.k_e)
                return die(DecodeFailure::out_of_range);
            pair_used_[src_][dest_] = pair_used_[dest_][src_] = 1;
            partner_count_[src_]++;
            partner_count_[dest_]++;
            int lo = std::min(src_, dest_), hi = std::max(src_, dest_);
            edges_.push_back({lo, hi, tok.value});
            state_ = State::EdgeBoundary;
            return true;
        }
        case State::Done:
            return die(DecodeFailure::trailing_tokens);
        case State::Dead:
            return false;
    }
    return false;
}

bool GrammarState::feed_id(int id) { return feed(detokenize(id, vocab_)); }

std::vector<bool> GrammarState::legal_mask() const {
    std::vector<bool> mask(vocab_.size(), false);
    auto allow = [&](const SemanticToken& t) { mask[tokenize(t, vocab_) - 1] = true; };
    switch (state_) {
        case State::Start:
            allow(SemanticToken::sog());
            break;
        case State::FirstNodeType:
            for (int c = 1; c <= vocab_.k_v; ++c) allow(SemanticToken::node_type(c));
            break;
        case State::AfterNodeType:
            allow(SemanticToken::node_idx(n_ + 1));
            break;
        case State::AfterNodePair:
            if (n_ < vocab_.n_max)
                for (int c = 1; c <= vocab_.k_v; ++c) allow(SemanticToken::node_type(c));
            allow(SemanticToken::sep());
            break;
        case State::EdgeBoundary:
            allow(SemanticToken::eog());
            for (int i = 1; i <= n_; ++i)
                if (partner_count_[i] < n_ - 1) allow(SemanticToken::node_idx(i));
            break;
        case State::AfterSrc:
            for (int j = 1; j <= n_; ++j)
                if (j != src_ && !pair_used_[src_][j]) allow(SemanticToken::node_idx(j));
            break;
        case State::AfterDest:
            for (int c = 1; c <= vocab_.k_e; ++c) allow(SemanticToken::edge_type(c));
            break;
        case State::Done:
        case State::Dead:
            break;
    }
    return mask;
}

bool GrammarState::is_legal(const SemanticToken& tok) const {
    if (state_ == State::Done || state_ == State::Dead) return false;
    int id;
    try {
        id = tokenize(tok, vocab_);
    } catch (const ConfigError&) {
        return false;
    }
    return legal_mask()[id - 1];
}

DecodeReport decode(const std::vector<SemanticToken>& tokens) {
    DecodeReport rep;
    if (tokens.empty()) {
        rep.failure_reason = DecodeFailure::empty;
        return rep;
    }
    // A roomy bound keeps the grammar cursor from rejecting node counts the
    // producing vocabulary allowed; payload range errors still surface.
    int n_cap = static_cast<int>(tokens.size());
    int k_v = 1, k_e = 1;
    for (const SemanticToken& t : tokens) {
        if (t.kind == TokKind::NodeType) k_v = std::max(k_v, t.value);
        if (t.kind == TokKind::EdgeType) k_e = std::max(k_e, t.value);
    }
    GrammarState st(Vocabulary{n_cap, k_v, k_e});
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!st.feed(tokens[i])) {
            rep.failure_position = static_cast<int>(i);
            rep.failure_reason = st.fail_;
            return rep;
        }
    }
    if (!st.complete()) {
        rep.failure_position = static_cast<int>(tokens.size());
        rep.failure_reason = DecodeFailure::truncated;
        return rep;
    }
    Graph g;
    g.n = st.n_;
    g.node_types = st.node_types_;
    g.edges = st.edges_;
    g.sort_edges();
    g.k_v = std::max(1, *std::max_element(g.node_types.begin(), g.node_types.end()));
    g.k_e = 1;
    for (const Edge& e : g.edges) g.k_e = std::max(g.k_e, e.etype);
    rep.graph = std::move(g);
    rep.valid_syntax = true;
    return rep;
}

DecodeReport decode_ids(const std::vector<int>& ids, const Vocabulary& v) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 1 || ids[i] > v.size()) {
            DecodeReport rep;
            rep.failure_position = static_cast<int>(i);
            rep.failure_reason = DecodeFailure::out_of_range;
            return rep;
        }
    }
    DecodeReport rep = decode(detokenize_all(ids, v));
    if (rep.graph) {
        rep.graph->k_v = v.k_v;
        rep.graph->k_e = v.k_e;
    }
    return rep;
}

std::vector<bool> legality_mask(const std::vector<SemanticToken>& prefix, int n_max, int k_v,
                                int k_e) {
    GrammarState st(Vocabulary{n_max, k_v, k_e});
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (!st.feed(prefix[i]))
            throw ConfigError("legality_mask: illegal prefix at position " + std::to_string(i));
    return st.legal_mask();
}

std::vector<int> encode_adjacency(const Graph& g, std::uint64_t bfs_seed) {
    Rng rng = make_rng(bfs_seed);
    std::vector<std::vector<int>> adj(g.n + 1);
    for (const Edge& e : g.edges) {
        adj[e.src].push_back(e.dest);
        adj[e.dest].push_back(e.src);
    }
    for (auto& nbrs : adj) shuffle_vec(nbrs, rng);

    // BFS first-visit order; fresh random starts for later components.
    std::vector<int> perm;
    std::vector<char> visited(g.n + 1, 0);
    std::vector<int> starts(g.n);
    for (int i = 0; i < g.n; ++i) starts[i] = i + 1;
    shuffle_vec(starts, rng);
    for (int s : starts) {
        if (visited[s]) continue;
        visited[s] = 1;
        std::vector<int> queue{s};
        std::size_t head = 0;
        while (head < queue.size()) {
            int v = queue[head++];
            perm.push_back(v);
            for (int w : adj[v])
                if (!visited[w]) {
                    visited[w] = 1;
                    queue.push_back(w);
                }
        }
    }

    std::vector<int> pos(g.n + 1, 0);
    for (int i = 0; i < g.n; ++i) pos[perm[i]] = i + 1;
    std::vector<std::vector<char>> a(g.n + 1, std::vector<char>(g.n + 1, 0));
    for (const Edge& e : g.edges) {
        int u = pos[e.src], v = pos[e.dest];
        a[u][v] = a[v][u] = 1;
    }

    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(g.n) * (g.n - 1) / 2 + 2);
    ids.push_back(AdjacencyVocab::sog);
    for (int row = 2; row <= g.n; ++row)
        for (int col = 1; col < row; ++col)
            ids.push_back(a[row][col] ? AdjacencyVocab::bit1 : AdjacencyVocab::bit0);
    ids.push_back(AdjacencyVocab::eog);
    return ids;
}

std::pair<int, int> adj_index_to_pair(long long i) {
    long long row = static_cast<long long>(
        std::ceil((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(i))) / 2.0));
    while ((row - 1) * (row - 2) / 2 >= i) --row;
    while (row * (row - 1) / 2 < i) ++row;
    long long col = i - (row - 1) * (row - 2) / 2;
    return {static_cast<int>(row), static_cast<int>(col)};
}

DecodeReport decode_adjacency(const std::vector<int>& ids, int n_cap) {
    DecodeReport rep;
    auto fail = [&](int pos, DecodeFailure f) {
        rep.failure_position = pos;
        rep.failure_reason = f;
        return rep;
    };
    if (ids.empty()) return fail(0, DecodeFailure::empty);
    if (ids.front() != AdjacencyVocab::sog) return fail(0, DecodeFailure::missing_sog);
    long long bits = 0;
    for (std::size_t i = 1; i < ids.size(); ++i) {
        if (ids[i] == AdjacencyVocab::eog) {
            if (i + 1 != ids.size())
                return fail(static_cast<int>(i + 1), DecodeFailure::trailing_tokens);
            // bit count must be triangular: n(n-1)/2
            long long n = 1;
            while (n * (n - 1) / 2 < bits) ++n;
            if (n * (n - 1) / 2 != bits)
                return fail(static_cast<int>(i), DecodeFailure::truncated);
            if (n > n_cap) return fail(static_cast<int>(i), DecodeFailure::out_of_range);
            Graph g = untyped_graph(static_cast<int>(n), {});
            for (long long b = 1; b <= bits; ++b) {
                if (ids[b] == AdjacencyVocab::bit1) {
                    auto [row, col] = adj_index_to_pair(b);
                    g.edges.push_back({col, row, 1});
                }
            }
            g.sort_edges();
            rep.graph = std::move(g);
            rep.valid_syntax = true;
            return rep;
        }
        if (ids[i] != AdjacencyVocab::bit0 && ids[i] != AdjacencyVocab::bit1)
            return fail(static_cast<int>(i), DecodeFailure::unexpected_token);
        bits++;
    }
    return fail(static_cast<int>(ids.size()), DecodeFailure::truncated);
}

void write_sequence_file(const std::string& path, const std::vector<std::vector<int>>& seqs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    for (const auto& s : seqs) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) f << ' ';
            f << s[i];
        }
        f << '\n';
    }
    if (!f) throw DataError("write failed: " + path);
}

std::vector<std::vector<int>> read_sequence_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open: " + path);
    std::vector<std::vector<int>> seqs;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<int> s;
        int x;
        while (ls >> x) s.push_back(x);
        seqs.push_back(std::move(s));
    }
    return seqs;
}

}  // namespace ggen
