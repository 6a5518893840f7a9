#pragma once

#include <cstdint>
#include <vector>

#include "ggen/graph.hpp"

namespace ggen {

// Color-refinement (1-WL) hash respecting node and edge types. Equal hashes
// do not certify isomorphism; it is a prefilter only.
std::uint64_t wl_hash(const Graph& g);

// Stable per-node colors after refinement converges; comparable across
// graphs (same color construction on both sides).
std::vector<std::uint64_t> wl_colors(const Graph& g);

// Exact isomorphism decision (types respected): WL prefilter, then
// backtracking over color-compatible candidate maps.
bool isomorphic(const Graph& g1, const Graph& g2);

}  // namespace ggen
