#pragma once

#include <string>

#include "ggen/graph.hpp"

namespace ggen {

enum class Family { planar, tree, lobster, sbm };

Family family_from_string(const std::string& s);
std::string to_string(Family f);

bool is_connected(const Graph& g);
bool is_tree(const Graph& g);
bool is_planar(const Graph& g);  // exact test (Boyer-Myrvold)
// Tree that becomes a path (or empty) after two rounds of leaf deletion.
bool is_lobster(const Graph& g);
// Block structure recovered by spectral clustering for block counts in
// [2, 5]; accepted when the best split has intra-density >= 0.15 and
// inter-density <= 0.15.
bool is_sbm_like(const Graph& g);

bool is_valid(const Graph& g, Family family);

}  // namespace ggen
