#pragma once

#include <vector>

#include "model.hpp"
#include "topology.hpp"
#include "types.hpp"

namespace orct {

// With the cuts held fixed, the optimal class-to-leaf assignment minimizes
//   sum_k sum_t q[k][t] * C[k][t]
// over column-stochastic C, optionally with every class covered by at least
// one leaf. An integral optimum always exists, so the solver returns a hard
// labeling: leaf t gets class labels[t].

// Per-class reach mass m[y][t] = sum over points of class y of P_i(t),
// flattened K x L, row-major. One forward pass over the data.
std::vector<double> class_leaf_masses(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                      const Dataset& data);

// q[k][t] = (1/N) sum_y W[y][k] * m[y][t] given precomputed masses.
std::vector<double> assignment_costs_from_masses(const std::vector<double>& masses, const CostMatrix& costs,
                                                 int n_leaves, std::size_t n_points);

// q[k][t] = (1/N) sum_i P_i(t) * W[y_i][k], flattened K x L, row-major.
std::vector<double> assignment_costs(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                     const CostMatrix& costs, const Dataset& data);

// Plain left-to-right sum of q[labels[t]][t] over leaves. Both the solver
// and any caller comparing objectives must use this exact reduction.
double labeling_objective(const std::vector<double>& q, int n_leaves, const std::vector<int>& labels);

struct AssignmentSolution {
    std::vector<int> labels;  // class of each leaf, by leaf offset
    double objective = 0.0;
};

// Exact minimizer. With coverage enforced it requires n_classes <= n_leaves
// (throws std::invalid_argument otherwise) and returns the lexicographically
// smallest optimal labeling in leaf order. Without coverage each leaf takes
// its cheapest class, lowest class index on ties.
AssignmentSolution solve_assignment(const std::vector<double>& q, int n_classes, int n_leaves, bool enforce_coverage);

LeafAssignment labels_to_assignment(const std::vector<int>& labels, int n_classes);

// Min-cost perfect matching of all rows into columns (n_rows <= n_cols),
// O(n_rows^2 * n_cols). Returns the matched column of each row and the
// total cost. Exposed for reuse and direct testing.
double min_cost_matching(const std::vector<double>& cost, int n_rows, int n_cols, std::vector<int>& col_of_row);

}  // namespace orct
