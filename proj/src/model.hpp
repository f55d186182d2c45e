#pragma once

#include <vector>

#include "topology.hpp"
#include "types.hpp"

namespace orct {

// Randomized-tree forward pass. A point routed through branch node t goes
// left with probability F_gamma((1/p) * sum_j a_jt x_j - mu_t); the argument
// >= 0 means the deterministic limit routes LEFT.

double split_argument(const SplitParameters& sp, const double* x, int node);

double branch_probability(const SmoothingCdf& cdf, const SplitParameters& sp, const double* x, int node);

// Probability of reaching every node, indexed by node id (entry 0 unused,
// root = 1). Leaf entries sum to 1 up to roundoff.
std::vector<double> node_probabilities(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                       const double* x);

// Probabilities of the leaves only, indexed by leaf offset.
std::vector<double> leaf_probabilities(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                       const double* x);

// P(point is assigned label k) = sum_leaf P(leaf) * C[k][leaf].
std::vector<double> class_membership(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                     const LeafAssignment& assignment, const double* x);

// argmax_k class membership, lowest class index on ties.
int predict_class(const std::vector<double>& membership);
int predict_class(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                  const LeafAssignment& assignment, const double* x);

// Deterministic routing: descend left iff the split argument >= 0. Returns
// the leaf offset reached.
int hard_route(const Topology& topo, const SplitParameters& sp, const double* x);

// Smallest |split argument| along any branch node, used to detect points
// near a decision boundary where the smoothed and hard routes can differ.
double min_abs_split_argument(const Topology& topo, const SplitParameters& sp, const double* x);

// Mean expected misclassification cost over the dataset:
//   (1/N) sum_i sum_leaf P_i(leaf) * sum_k W[y_i][k] * C[k][leaf].
double expected_cost(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                     const LeafAssignment& assignment, const CostMatrix& costs, const Dataset& data);

// Expected per-class correct mass: for each class k, sum over its points of
// P(point labeled k). Used by performance targets (one entry per class).
std::vector<double> class_correct_mass(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                       const LeafAssignment& assignment, const Dataset& data);

}  // namespace orct
