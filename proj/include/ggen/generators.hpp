#pragma once

#include <cstdint>
#include <vector>

#include "ggen/graph.hpp"
#include "ggen/validity.hpp"

namespace ggen {

// Families are untyped (K_v = K_e = 1). Node counts are drawn uniformly from
// [n_min, n_max] for planar/tree; lobster grows a backbone and attaches
// leaves until the draw lands in [n_min, n_max]; sbm draws the block count
// and per-block sizes from their ranges.
struct DatasetSpec {
    Family family = Family::tree;
    int count = 1;
    std::uint64_t seed = 0;

    int n_min = 16;
    int n_max = 24;

    // lobster
    double p1 = 0.7;
    double p2 = 0.7;

    // sbm
    int blocks_min = 2;
    int blocks_max = 3;
    int block_size_min = 10;
    int block_size_max = 13;
    double p_intra = 0.3;
    double p_inter = 0.05;

    void validate() const;  // throws ConfigError
};

// Each returned graph passes is_valid(., spec.family); deterministic in
// spec.seed, with per-graph sub-seeds so parallel generation stays stable.
std::vector<Graph> generate_dataset(const DatasetSpec& spec);

Graph random_tree(int n, std::uint64_t seed);             // uniform via Pruefer
Graph delaunay_planar(int n, std::uint64_t seed);         // n >= 3
Graph random_lobster(const DatasetSpec& spec, std::uint64_t seed);
Graph random_sbm(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace ggen
