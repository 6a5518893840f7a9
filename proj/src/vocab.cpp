#include "ggen/vocab.hpp"

#include <cstdio>

#include "ggen/errors.hpp"

namespace ggen {

int tokenize(const SemanticToken& tok, const Vocabulary& v) {
    switch (tok.kind) {
        case TokKind::NodeIdx:
            if (tok.value < 1 || tok.value > v.n_max)
                throw ConfigError("tokenize: node index out of range");
            return tok.value;
        case TokKind::NodeType:
            if (tok.value < 1 || tok.value > v.k_v)
                throw ConfigError("tokenize: node type out of range");
            return tok.value + v.n_max;
        case TokKind::EdgeType:
            if (tok.value < 1 || tok.value > v.k_e)
                throw ConfigError("tokenize: edge type out of range");
            return tok.value + v.n_max + v.k_v;
        case TokKind::SEP: return v.sep_id();
        case TokKind::SOG: return v.sog_id();
        case TokKind::EOG: return v.eog_id();
    }
    throw ConfigError("tokenize: bad token kind");
}

SemanticToken detokenize(int id, const Vocabulary& v) {
    if (id < 1 || id > v.size()) throw ConfigError("detokenize: id out of range");
    if (id <= v.n_max) return SemanticToken::node_idx(id);
    if (id <= v.n_max + v.k_v) return SemanticToken::node_type(id - v.n_max);
    if (id <= v.n_max + v.k_v + v.k_e) return SemanticToken::edge_type(id - v.n_max - v.k_v);
    if (id == v.sep_id()) return SemanticToken::sep();
    if (id == v.sog_id()) return SemanticToken::sog();
    return SemanticToken::eog();
}

std::vector<int> tokenize_all(const std::vector<SemanticToken>& toks, const Vocabulary& v) {
    std::vector<int> ids;
    ids.reserve(toks.size());
    for (const SemanticToken& t : toks) ids.push_back(tokenize(t, v));
    return ids;
}

std::vector<SemanticToken> detokenize_all(const std::vector<int>& ids, const Vocabulary& v) {
    std::vector<SemanticToken> toks;
    toks.reserve(ids.size());
    for (int id : ids) toks.push_back(detokenize(id, v));
    return toks;
}

std::string vocab_manifest(const Vocabulary& v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "n_max=%d, K_v=%d, K_e=%d", v.n_max, v.k_v, v.k_e);
    return buf;
}

Vocabulary parse_vocab_manifest(const std::string& line) {
    Vocabulary v;
    if (std::sscanf(line.c_str(), "n_max=%d, K_v=%d, K_e=%d", &v.n_max, &v.k_v, &v.k_e) != 3)
        throw DataError("bad vocabulary manifest: " + line);
    return v;
}

}  // namespace ggen
