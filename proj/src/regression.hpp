#pragma once

#include <vector>

#include "model.hpp"
#include "topology.hpp"
#include "trainer.hpp"
#include "types.hpp"

namespace orct {

// Regression trees share the randomized routing of the classifier but carry
// a real value phi_t per leaf; the prediction is the expected leaf value
// sum_t P_t(x) * phi_t and training minimizes mean squared error.

struct RegressionModel {
    Topology topo;
    double gamma = 0.0;
    SplitParameters params;
    std::vector<double> phi;
    double mse = 0.0;
    int best_start = 0;
    std::vector<StartDiagnostics> diagnostics;
    std::vector<TraceRow> trace;
};

double predict_value(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                     const std::vector<double>& phi, const double* x);

// (1/N) * sum_i (sum_t P_i(t) * phi_t - y_i)^2. Throws on empty data.
double orrt_objective(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                      const std::vector<double>& phi, const Dataset& data);

// Exact inner minimizer of the MSE in phi for fixed cuts: solves the normal
// equations of the N x L membership matrix with a 1e-10 ridge for rank
// safety (empty leaves otherwise make the system singular).
std::vector<double> solve_leaf_values(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                      const Dataset& data);

// Multi-start alternating trainer: exact phi solve, projected-gradient
// Armijo steps on (a, mu). Uses the classifier TrainConfig's depth, gamma,
// gamma_schedule, starts, stopping, Armijo, seed, threads and trace
// settings; rho/costs/coverage fields are ignored (regression has no class
// constraints).
RegressionModel train_orrt(const Dataset& data, const TrainConfig& cfg);

}  // namespace orct
