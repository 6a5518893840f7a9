#pragma once

#include <string>
#include <vector>

namespace ggen {

enum class TokKind { SOG, EOG, SEP, NodeIdx, NodeType, EdgeType };

struct SemanticToken {
    TokKind kind;
    int value = 0;  // payload for NodeIdx/NodeType/EdgeType

    static SemanticToken sog() { return {TokKind::SOG}; }
    static SemanticToken eog() { return {TokKind::EOG}; }
    static SemanticToken sep() { return {TokKind::SEP}; }
    static SemanticToken node_idx(int i) { return {TokKind::NodeIdx, i}; }
    static SemanticToken node_type(int c) { return {TokKind::NodeType, c}; }
    static SemanticToken edge_type(int c) { return {TokKind::EdgeType, c}; }

    friend bool operator==(const SemanticToken&, const SemanticToken&) = default;
};

// Id layout (1-based):
//   node indices        1 .. n_max
//   node types          n_max+1 .. n_max+K_v
//   edge types          n_max+K_v+1 .. n_max+K_v+K_e
//   SEP                 n_max+K_v+K_e+1
//   SOG                 n_max+K_v+K_e+2
//   EOG                 n_max+K_v+K_e+3
// PAD is an embedding-table-only extra id (size+1); it never appears in
// sequences or logits.
struct Vocabulary {
    int n_max = 0;
    int k_v = 1;
    int k_e = 1;

    int size() const { return n_max + k_v + k_e + 3; }
    int sep_id() const { return n_max + k_v + k_e + 1; }
    int sog_id() const { return n_max + k_v + k_e + 2; }
    int eog_id() const { return n_max + k_v + k_e + 3; }
    int pad_id() const { return size() + 1; }

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

int tokenize(const SemanticToken& tok, const Vocabulary& v);   // throws ConfigError
SemanticToken detokenize(int id, const Vocabulary& v);         // throws ConfigError

std::vector<int> tokenize_all(const std::vector<SemanticToken>& toks, const Vocabulary& v);
std::vector<SemanticToken> detokenize_all(const std::vector<int>& ids, const Vocabulary& v);

// Manifest line: "n_max=…, K_v=…, K_e=…"
std::string vocab_manifest(const Vocabulary& v);
Vocabulary parse_vocab_manifest(const std::string& line);

}  // namespace ggen
