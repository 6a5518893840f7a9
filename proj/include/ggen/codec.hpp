#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ggen/graph.hpp"
#include "ggen/ordering.hpp"
#include "ggen/vocab.hpp"

namespace ggen {

enum class DecodeFailure {
    none,
    empty,
    missing_sog,
    unexpected_token,
    index_mismatch,   // node index must equal the running node count
    out_of_range,
    self_loop,
    duplicate_edge,
    trailing_tokens,
    truncated,
};

std::string to_string(DecodeFailure f);

struct DecodeReport {
    std::optional<Graph> graph;
    bool valid_syntax = false;
    std::optional<int> failure_position;  // 0-based token index
    DecodeFailure failure_reason = DecodeFailure::none;
};

// [SOG, (type, idx) x n, SEP, (src, dest, etype) x m, EOG] over the graph
// relabeled by a random node order; length 2n + 3m + 3. Edge pairs keep
// traversal orientation for bfs/dfs and are canonical (min, max) otherwise.
std::vector<SemanticToken> encode(const Graph& g, std::uint64_t node_seed,
                                  OrderPolicy edge_policy, std::uint64_t edge_seed);

// Exact inverse on well-formed sequences; otherwise reports the first
// offending position. Either edge orientation is accepted.
DecodeReport decode(const std::vector<SemanticToken>& tokens);
DecodeReport decode_ids(const std::vector<int>& ids, const Vocabulary& v);

// Incremental grammar cursor over the sequence language; backs both
// legality_mask and masked sampling.
class GrammarState {
  public:
    explicit GrammarState(const Vocabulary& v);

    // Advances by one token; returns false (and freezes) on an illegal token.
    bool feed(const SemanticToken& tok);
    bool feed_id(int id);

    // Mask over token ids, entry id-1 set iff the id may come next.
    std::vector<bool> legal_mask() const;
    bool is_legal(const SemanticToken& tok) const;
    bool complete() const { return state_ == State::Done; }
    int node_count() const { return n_; }

  private:
    enum class State { Start, FirstNodeType, AfterNodeType, AfterNodePair,
                       EdgeBoundary, AfterSrc, AfterDest, Done, Dead };
    friend DecodeReport decode(const std::vector<SemanticToken>&);

    Vocabulary vocab_;
    State state_ = State::Start;
    int n_ = 0;
    int src_ = 0, dest_ = 0;
    std::vector<int> partner_count_;              // distinct partners used per node
    std::vector<std::vector<char>> pair_used_;
    std::vector<int> node_types_;
    std::vector<Edge> edges_;
    DecodeFailure fail_ = DecodeFailure::none;
};

// Mask accessor matching the spec surface; throws ConfigError if the prefix
// itself is illegal.
std::vector<bool> legality_mask(const std::vector<SemanticToken>& prefix, int n_max, int k_v,
                                int k_e);

// --- adjacency-matrix baseline codec (untyped graphs) ---
// Strictly-lower-triangular bits, rows concatenated, under a BFS node
// permutation, framed by SOG/EOG; vocabulary of size 4.
struct AdjacencyVocab {
    static constexpr int bit0 = 1;
    static constexpr int bit1 = 2;
    static constexpr int sog = 3;
    static constexpr int eog = 4;
    static constexpr int size() { return 4; }
    static constexpr int pad_id() { return 5; }
};

std::vector<int> encode_adjacency(const Graph& g, std::uint64_t bfs_seed);
DecodeReport decode_adjacency(const std::vector<int>& ids, int n_cap);

// Row/col of the i-th entry (1-based) of the flattened strict lower triangle:
// row = ceil((1 + sqrt(1 + 8i)) / 2), col = i - (row-1)(row-2)/2.
std::pair<int, int> adj_index_to_pair(long long i);

// --- token-sequence files: one sequence of whitespace-separated ids per line ---
void write_sequence_file(const std::string& path, const std::vector<std::vector<int>>& seqs);
std::vector<std::vector<int>> read_sequence_file(const std::string& path);

}  // namespace ggen
