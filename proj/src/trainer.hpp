#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "assignment.hpp"
#include "gradients.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "topology.hpp"
#include "types.hpp"

namespace orct {

struct ArmijoConfig {
    double c1 = 1e-4;
    double shrink = 0.5;
    // Base step, rescaled per iteration by 1 / (1 + ||gradient||_inf) so the
    // sharp large-gamma objective does not reject every trial immediately.
    double initial_step = 1.0;
    double min_step = 1e-16;
};

struct AugLagConfig {
    double penalty_init = 1.0;
    double penalty_growth = 10.0;
    double multiplier_max = 1e6;
    int outer_rounds = 8;
    // Tolerance on the per-class rate shortfall max(0, rho_k - g_k/|I_k|).
    double feasibility_tol = 1e-4;
};

struct TrainConfig {
    int depth = 2;
    double gamma = 512.0;
    // Misclassification costs; if `costs` is empty a uniform matrix with
    // this off-diagonal value is built for the data's class count.
    double cost_off_diagonal = 0.5;
    CostMatrix costs;
    int n_starts = 20;
    int max_outer_iters = 500;
    double tol_rel_objective = 1e-6;
    int stall_iters = 5;
    ArmijoConfig armijo;
    // Per-class lower bounds on the expected in-class correct rate, as
    // fractions in [0,1]. Empty or all-zero means unconstrained.
    std::vector<double> rho;
    AugLagConfig aug;
    std::uint64_t seed = 0;
    bool enforce_coverage = true;
    // Optional continuation: train through these gamma values in order
    // before finishing at `gamma`. Empty (the default) trains at `gamma`
    // directly.
    std::vector<double> gamma_schedule;
    int n_threads = 0;  // 0 = hardware concurrency
    bool collect_trace = false;
};

struct TraceRow {
    int start = 0;
    int iteration = 0;
    double objective = 0.0;  // penalized objective after the iteration
    double step = 0.0;       // accepted Armijo step (0 if no step accepted)
    double max_violation = 0.0;
};

struct StartDiagnostics {
    int start_index = 0;
    int iterations = 0;
    double objective = 0.0;      // penalized objective at the final iterate
    double cost = 0.0;           // plain expected cost at the final iterate
    double max_violation = 0.0;  // largest per-class rate shortfall
};

struct TrainedModel {
    Topology topo;
    double gamma = 0.0;
    SplitParameters params;
    LeafAssignment assignment;
    double objective = 0.0;  // expected cost on the training data
    bool constraints_unmet = false;
    std::vector<double> achieved_rates;  // per-class g_k / |I_k|
    std::vector<double> violations;      // per-class max(0, rho_k - rate)
    int best_start = 0;
    std::vector<StartDiagnostics> diagnostics;
    std::vector<TraceRow> trace;  // filled when collect_trace is set
};

// Random initial cuts: every entry of (a, mu) i.i.d. uniform on [-1, 1].
SplitParameters initialize(Rng& rng, const Topology& topo, int p);

// Continuation stages for a config: gamma_schedule followed by the target
// gamma (appended unless already last). No schedule means a single stage.
std::vector<double> gamma_stages(const TrainConfig& cfg);

struct SingleStartResult {
    SplitParameters params;
    LeafAssignment assignment;
    double penalized = 0.0;
    double cost = 0.0;
    double max_violation = 0.0;
    int iterations = 0;
    std::vector<TraceRow> trace;
};

// One local solve from the given seed: alternates exact assignment resolves
// with projected-gradient Armijo steps on (a, mu), descending exactly (each
// accepted change is kept only if the recorded objective does not increase).
// With rho targets set, runs the augmented-Lagrangian outer loop around the
// same alternation.
SingleStartResult single_start(const Dataset& data, const TrainConfig& cfg, const Topology& topo,
                               std::uint64_t start_seed, int start_index);

// Multi-start training: runs n_starts independent solves (seeds seed+0 ..
// seed+n_starts-1, possibly in parallel) and keeps the best. Unconstrained
// runs pick the lowest objective; constrained runs prefer feasible starts
// (within aug.feasibility_tol) by objective, then the least-violating one.
// Ties always break to the lowest start index. The winner's assignment is
// re-solved exactly for its final cuts before being returned.
TrainedModel train(const Dataset& data, const TrainConfig& cfg);

std::string trace_to_csv(const std::vector<TraceRow>& trace);

}  // namespace orct
