#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "ggen/graph.hpp"

namespace ggen {

inline constexpr int kClusteringBins = 100;  // over [0, 1]
inline constexpr int kSpectrumBins = 200;    // over [0, 2]
inline constexpr int kNumOrbits = 15;        // orbits of connected graphlets on <= 4 nodes

// Normalized histograms; each sums to 1 when the underlying count is nonzero.
struct GraphStatistics {
    std::vector<double> degree_hist;      // bin d = fraction of nodes with degree d
    std::vector<double> clustering_hist;  // kClusteringBins bins over [0, 1]
    std::vector<double> orbit_hist;       // kNumOrbits bins
    std::vector<double> spectrum_hist;    // kSpectrumBins bins over [0, 2]
};

GraphStatistics compute_statistics(const Graph& g);

// Local clustering coefficient per node (0 for degree < 2).
std::vector<double> clustering_coefficients(const Graph& g);

// Per-node orbit counts, orbit numbering:
//   0 degree; 1/2 path-3 end/mid; 3 triangle;
//   4/5 path-4 end/mid; 6/7 claw leaf/hub; 8 cycle-4;
//   9/10/11 paw tail/rim/hinge; 12/13 diamond deg2/deg3; 14 K4.
// 4-node orbits are enumerated over connected induced subgraphs (ESU).
std::vector<std::array<long long, kNumOrbits>> orbit_counts(const Graph& g);

// Eigenvalues of the symmetric normalized Laplacian D^{+1/2} (D - A) D^{+1/2}
// (rows of isolated nodes are zero), ascending order. Cyclic Jacobi.
std::vector<double> normalized_laplacian_eigenvalues(const Graph& g);

Eigen::MatrixXd normalized_laplacian(const Graph& g);

// Cyclic Jacobi on a symmetric matrix; sweeps until the off-diagonal
// Frobenius norm drops below tol. Eigenvalues ascending; eigenvectors_out
// columns aligned with them (pass nullptr to skip accumulating rotations).
void jacobi_eigen(Eigen::MatrixXd a, Eigen::VectorXd& eigenvalues,
                  Eigen::MatrixXd* eigenvectors_out, double tol = 1e-10);

}  // namespace ggen
