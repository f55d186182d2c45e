#pragma once

#include <vector>

#include "assignment.hpp"
#include "model.hpp"
#include "topology.hpp"
#include "types.hpp"

namespace orct {

// Gradient of a leaf-weighted objective of the form
//   (1/N) sum_i sum_leaf P_i(leaf) * w_i[leaf]
// with respect to (a, mu). Each branch node contributes through its own
// Bernoulli factor only, so per point the gradient is computed with one
// downward pass (reach probabilities) and one upward pass (conditional
// expectation of w over the subtree below each node).
struct Gradient {
    std::vector<double> d_a;   // same layout as SplitParameters::a
    std::vector<double> d_mu;  // same layout as SplitParameters::mu
};

// Per-point leaf weights for the expected misclassification cost:
//   w_i[leaf] = sum_k W[y_i][k] * C[k][leaf].
std::vector<double> cost_leaf_weights(const LeafAssignment& assignment, const CostMatrix& costs);

// Objective value and gradient of expected misclassification cost. The
// returned objective matches expected_cost() to roundoff.
double cost_objective_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                               const LeafAssignment& assignment, const CostMatrix& costs, const Dataset& data,
                               Gradient& grad);

// Generic weighted form used by both the cost objective and performance
// terms: value = scale * sum_{i in rows} sum_leaf P_i(leaf) * leaf_w[w_row(i)][leaf].
// `leaf_w` is indexed per class; points contribute the row of their label.
// Gradient is accumulated into `grad` (caller zeroes it).
double accumulate_weighted_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                    const std::vector<int>& rows, const Dataset& data,
                                    const std::vector<double>& leaf_w_by_class, int n_leaves, double scale,
                                    Gradient& grad);

// Expected correctly-captured mass of one class and its gradient:
//   g_k = sum_{i: y_i = k} sum_leaf P_i(leaf) * C[k][leaf].
// Gradient is ADDED into `grad` scaled by `scale`.
double class_mass_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                           const LeafAssignment& assignment, const Dataset& data, int klass, double scale,
                           Gradient& grad);

// Derivative of the expected cost with respect to the assignment entries:
// d/dC[k][t] = (1/N) sum_i P_i(t) * W[y_i][k]. This is exactly the inner
// transportation cost matrix, so it is independent of the current C.
std::vector<double> objective_c_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                         const CostMatrix& costs, const Dataset& data);

// Derivative of the class-k captured mass with respect to C: row k equals
// the per-leaf reach mass of class k's points, all other rows are zero.
// Returns the K x L matrix flattened row-major.
std::vector<double> performance_c_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                           const Dataset& data, int klass);

inline Gradient make_zero_gradient(const SplitParameters& sp) {
    Gradient g;
    g.d_a.assign(sp.a.size(), 0.0);
    g.d_mu.assign(sp.mu.size(), 0.0);
    return g;
}

}  // namespace orct
