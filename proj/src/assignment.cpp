#include "assignment.hpp"

#include "errors.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace orct {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<double> class_leaf_masses(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                      const Dataset& data) {
    const int K = data.n_classes;
    const int L = topo.n_leaves;
    std::vector<CompensatedSum> mass(static_cast<std::size_t>(K) * L);
    for (std::size_t i = 0; i < data.n; ++i) {
        const auto leaves = leaf_probabilities(topo, cdf, sp, data.row(i));
        CompensatedSum* row = mass.data() + static_cast<std::size_t>(data.y[i]) * L;
        for (int t = 0; t < L; ++t) row[t].add(leaves[t]);
    }
    std::vector<double> out(mass.size());
    for (std::size_t i = 0; i < mass.size(); ++i) out[i] = mass[i].value();
    return out;
}

std::vector<double> assignment_costs_from_masses(const std::vector<double>& masses, const CostMatrix& costs,
                                                 int n_leaves, std::size_t n_points) {
    const int K = costs.n_classes;
    const double inv_n = 1.0 / static_cast<double>(n_points);
    std::vector<double> q(static_cast<std::size_t>(K) * n_leaves, 0.0);
    for (int k = 0; k < K; ++k) {
        for (int t = 0; t < n_leaves; ++t) {
            CompensatedSum s;
            for (int y = 0; y < K; ++y) s.add(costs.at(y, k) * masses[static_cast<std::size_t>(y) * n_leaves + t]);
            q[static_cast<std::size_t>(k) * n_leaves + t] = s.value() * inv_n;
        }
    }
    return q;
}

std::vector<double> assignment_costs(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                     const CostMatrix& costs, const Dataset& data) {
    return assignment_costs_from_masses(class_leaf_masses(topo, cdf, sp, data), costs, topo.n_leaves, data.n);
}

double labeling_objective(const std::vector<double>& q, int n_leaves, const std::vector<int>& labels) {
    double total = 0.0;
    for (int t = 0; t < n_leaves; ++t) total += q[static_cast<std::size_t>(labels[t]) * n_leaves + t];
    return total;
}

double min_cost_matching(const std::vector<double>& cost, int n_rows, int n_cols, std::vector<int>& col_of_row) {
    if (n_rows > n_cols) throw std::invalid_argument("matching needs at least as many columns as rows");
    // Shortest augmenting paths with potentials; 1-based with column 0 as the
    // virtual root. p[j] = row matched to column j. Ties resolve to the
    // lowest column index, which keeps the result deterministic.
    std::vector<double> u(n_rows + 1, 0.0), v(n_cols + 1, 0.0);
    std::vector<int> p(n_cols + 1, 0), way(n_cols + 1, 0);
    for (int i = 1; i <= n_rows; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n_cols + 1, kInf);
        std::vector<char> used(n_cols + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n_cols; ++j) {
                if (used[j]) continue;
                const double cur = cost[static_cast<std::size_t>(i0 - 1) * n_cols + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n_cols; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    col_of_row.assign(n_rows, -1);
    for (int j = 1; j <= n_cols; ++j) {
        if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
    }
    double total = 0.0;
    for (int i = 0; i < n_rows; ++i) total += cost[static_cast<std::size_t>(i) * n_cols + col_of_row[i]];
    return total;
}

namespace {

// Completion certificate: given fixed labels for leaves [0, t_fixed) and the
// set of classes still uncovered, fills the remaining leaves with their
// cheapest class except that each uncovered class takes one leaf via a
// min-cost matching on regrets. Returns false if coverage cannot be met.
bool complete_labeling(const std::vector<double>& regret, const std::vector<int>& argmin_label, int n_classes,
                       int n_leaves, int t_fixed, std::vector<int>& labels) {
    std::vector<char> covered(n_classes, 0);
    for (int t = 0; t < t_fixed; ++t) covered[labels[t]] = 1;
    std::vector<int> uncovered;
    for (int k = 0; k < n_classes; ++k) {
        if (!covered[k]) uncovered.push_back(k);
    }
    const int n_remaining = n_leaves - t_fixed;
    if (static_cast<int>(uncovered.size()) > n_remaining) return false;
    for (int t = t_fixed; t < n_leaves; ++t) labels[t] = argmin_label[t];
    if (uncovered.empty()) return true;

    std::vector<double> sub(uncovered.size() * static_cast<std::size_t>(n_remaining));
    for (std::size_t r = 0; r < uncovered.size(); ++r) {
        for (int c = 0; c < n_remaining; ++c) {
            sub[r * n_remaining + c] = regret[static_cast<std::size_t>(uncovered[r]) * n_leaves + (t_fixed + c)];
        }
    }
    std::vector<int> col_of_row;
    min_cost_matching(sub, static_cast<int>(uncovered.size()), n_remaining, col_of_row);
    for (std::size_t r = 0; r < uncovered.size(); ++r) labels[t_fixed + col_of_row[r]] = uncovered[r];
    return true;
}

}  // namespace

AssignmentSolution solve_assignment(const std::vector<double>& q, int n_classes, int n_leaves,
                                    bool enforce_coverage) {
    if (n_classes < 1 || n_leaves < 1 || q.size() != static_cast<std::size_t>(n_classes) * n_leaves) {
        throw std::invalid_argument("assignment cost matrix shape mismatch");
    }
    std::vector<int> argmin_label(n_leaves, 0);
    std::vector<double> base(n_leaves);
    for (int t = 0; t < n_leaves; ++t) {
        int best = 0;
        for (int k = 1; k < n_classes; ++k) {
            if (q[static_cast<std::size_t>(k) * n_leaves + t] < q[static_cast<std::size_t>(best) * n_leaves + t]) {
                best = k;
            }
        }
        argmin_label[t] = best;
        base[t] = q[static_cast<std::size_t>(best) * n_leaves + t];
    }

    AssignmentSolution sol;
    if (!enforce_coverage) {
        sol.labels = argmin_label;
        sol.objective = labeling_objective(q, n_leaves, sol.labels);
        return sol;
    }
    if (n_classes > n_leaves) {
        throw infeasible_error("coverage needs at least as many leaves as classes: " +
                                    std::to_string(n_classes) + " classes vs " + std::to_string(n_leaves) +
                                    " leaves");
    }

    std::vector<double> regret(q.size());
    for (int k = 0; k < n_classes; ++k) {
        for (int t = 0; t < n_leaves; ++t) {
            regret[static_cast<std::size_t>(k) * n_leaves + t] = q[static_cast<std::size_t>(k) * n_leaves + t] - base[t];
        }
    }

    // Any coverage-feasible labeling contains one representative leaf per
    // class; those pairs form a matching, and its regret cost is the
    // labeling's excess over the per-leaf minima. Conversely a matching plus
    // argmin fill is feasible, so the minimum matching gives the optimum.
    std::vector<int> labels(n_leaves);
    if (!complete_labeling(regret, argmin_label, n_classes, n_leaves, 0, labels)) {
        throw infeasible_error("coverage infeasible");
    }
    const double best_objective = labeling_objective(q, n_leaves, labels);

    // Make the optimum canonical: walk leaves in order, swapping in the
    // smallest class that still admits a completion of equal objective.
    std::vector<int> trial(n_leaves);
    for (int t = 0; t < n_leaves; ++t) {
        double prefix = 0.0;
        for (int s = 0; s < t; ++s) prefix += q[static_cast<std::size_t>(labels[s]) * n_leaves + s];
        double suffix_base = 0.0;
        for (int s = t + 1; s < n_leaves; ++s) suffix_base += base[s];
        for (int k = 0; k < labels[t]; ++k) {
            if (prefix + q[static_cast<std::size_t>(k) * n_leaves + t] + suffix_base > best_objective) continue;
            std::copy(labels.begin(), labels.begin() + t, trial.begin());
            trial[t] = k;
            if (!complete_labeling(regret, argmin_label, n_classes, n_leaves, t + 1, trial)) continue;
            if (labeling_objective(q, n_leaves, trial) == best_objective) {
                labels = trial;
                break;
            }
        }
    }

    sol.labels = std::move(labels);
    sol.objective = best_objective;
    return sol;
}

LeafAssignment labels_to_assignment(const std::vector<int>& labels, int n_classes) {
    LeafAssignment la = LeafAssignment::zeros(n_classes, static_cast<int>(labels.size()));
    for (int t = 0; t < la.n_leaves; ++t) la.at(labels[t], t) = 1.0;
    return la;
}

}  // namespace orct
