#include "trainer.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace orct {

SplitParameters initialize(Rng& rng, const Topology& topo, int p) {
    SplitParameters sp = SplitParameters::zeros(p, topo.n_branch);
    for (double& v : sp.a) v = rng.uniform(-1.0, 1.0);
    for (double& v : sp.mu) v = rng.uniform(-1.0, 1.0);
    return sp;
}

namespace {

struct ProblemView {
    const Dataset& data;
    const Topology& topo;
    CostMatrix costs;
    bool constrained = false;
    std::vector<double> rho;          // size K, zeros when inactive
    std::vector<double> target_mass;  // rho_k * |I_k|
};

struct StateEval {
    double cost = 0.0;       // expected misclassification cost
    double penalized = 0.0;  // cost + multiplier and quadratic penalty terms
    std::vector<double> mass;      // captured mass per class
    std::vector<double> viol_raw;  // max(0, target_mass_k - mass_k)
    double max_shortfall = 0.0;    // violations as rates: max_k viol_raw/|I_k|
};

// One pass over the data: expected cost plus, for constrained problems, the
// per-class captured mass and the penalty terms at the given multipliers.
StateEval evaluate_state(const ProblemView& pv, const SmoothingCdf& cdf, const SplitParameters& sp,
                         const LeafAssignment& assignment, const std::vector<double>& lambda, double sigma) {
    const int K = pv.data.n_classes;
    const int L = assignment.n_leaves;
    const auto leaf_w = cost_leaf_weights(assignment, pv.costs);

    CompensatedSum cost_acc;
    std::vector<CompensatedSum> mass_acc(pv.constrained ? K : 0);
    for (std::size_t i = 0; i < pv.data.n; ++i) {
        const auto leaves = leaf_probabilities(pv.topo, cdf, sp, pv.data.row(i));
        const int y = pv.data.y[i];
        const double* w = leaf_w.data() + static_cast<std::size_t>(y) * L;
        CompensatedSum ci;
        for (int t = 0; t < L; ++t) ci.add(leaves[t] * w[t]);
        cost_acc.add(ci.value());
        if (pv.constrained) {
            CompensatedSum mi;
            for (int t = 0; t < L; ++t) mi.add(leaves[t] * assignment.at(y, t));
            mass_acc[y].add(mi.value());
        }
    }

    StateEval ev;
    ev.cost = cost_acc.value() / static_cast<double>(pv.data.n);
    ev.penalized = ev.cost;
    if (pv.constrained) {
        ev.mass.resize(K);
        ev.viol_raw.assign(K, 0.0);
        for (int k = 0; k < K; ++k) {
            ev.mass[k] = mass_acc[k].value();
            const double v = pv.target_mass[k] - ev.mass[k];
            if (v > 0.0) ev.viol_raw[k] = v;
            const std::size_t nk = pv.data.class_index_sets[k].size();
            if (nk > 0) ev.max_shortfall = std::max(ev.max_shortfall, ev.viol_raw[k] / static_cast<double>(nk));
            ev.penalized += lambda[k] * ev.viol_raw[k] + 0.5 * sigma * ev.viol_raw[k] * ev.viol_raw[k];
        }
    }
    if (!std::isfinite(ev.penalized)) {
        throw std::runtime_error("training objective became non-finite");
    }
    return ev;
}

// Gradient of the penalized objective with respect to (a, mu) at fixed C.
Gradient penalized_gradient(const ProblemView& pv, const SmoothingCdf& cdf, const SplitParameters& sp,
                            const LeafAssignment& assignment, const StateEval& ev,
                            const std::vector<double>& lambda, double sigma) {
    Gradient grad = make_zero_gradient(sp);
    const auto leaf_w = cost_leaf_weights(assignment, pv.costs);
    std::vector<int> rows(pv.data.n);
    std::iota(rows.begin(), rows.end(), 0);
    accumulate_weighted_gradient(pv.topo, cdf, sp, rows, pv.data, leaf_w, assignment.n_leaves,
                                 1.0 / static_cast<double>(pv.data.n), grad);
    if (pv.constrained) {
        for (int k = 0; k < pv.data.n_classes; ++k) {
            if (ev.viol_raw[k] <= 0.0) continue;
            const double coef = lambda[k] + sigma * ev.viol_raw[k];
            if (coef == 0.0) continue;
            class_mass_gradient(pv.topo, cdf, sp, assignment, pv.data, k, -coef, grad);
        }
    }
    return grad;
}

double grad_inf_norm(const Gradient& g) {
    double m = 0.0;
    for (double v : g.d_a) m = std::max(m, std::abs(v));
    for (double v : g.d_mu) m = std::max(m, std::abs(v));
    return m;
}

// Exact resolve of C for the current cuts. For constrained problems the
// transportation costs are shifted by the linearized penalty terms; the
// candidate is kept only if the true penalized objective does not increase,
// which preserves exact descent despite the linearization.
void resolve_assignment(const ProblemView& pv, const TrainConfig& cfg, const SmoothingCdf& cdf,
                        const SplitParameters& sp, const std::vector<double>& lambda, double sigma,
                        LeafAssignment& assignment, StateEval& ev) {
    const auto masses = class_leaf_masses(pv.topo, cdf, sp, pv.data);
    auto q = assignment_costs_from_masses(masses, pv.costs, pv.topo.n_leaves, pv.data.n);
    if (pv.constrained) {
        const int L = pv.topo.n_leaves;
        for (int k = 0; k < pv.data.n_classes; ++k) {
            const double coef = lambda[k] + sigma * ev.viol_raw[k];
            if (coef == 0.0) continue;
            for (int t = 0; t < L; ++t) {
                q[static_cast<std::size_t>(k) * L + t] -= coef * masses[static_cast<std::size_t>(k) * L + t];
            }
        }
    }
    const auto sol = solve_assignment(q, pv.data.n_classes, pv.topo.n_leaves, cfg.enforce_coverage);
    LeafAssignment cand = labels_to_assignment(sol.labels, pv.data.n_classes);
    StateEval cand_ev = evaluate_state(pv, cdf, sp, cand, lambda, sigma);
    if (cand_ev.penalized <= ev.penalized) {
        assignment = std::move(cand);
        ev = std::move(cand_ev);
    }
}

struct InnerResult {
    int iterations = 0;
    bool step_underflow = false;
};

// Alternating descent at fixed multipliers: exact C resolve, then one
// projected-gradient Armijo step on (a, mu), per outer iteration. The
// recorded objective never increases: both moves are guarded.
InnerResult inner_solve(const ProblemView& pv, const TrainConfig& cfg, const SmoothingCdf& cdf,
                        SplitParameters& sp, LeafAssignment& assignment, StateEval& ev,
                        const std::vector<double>& lambda, double sigma, int start_index, int iter_offset,
                        std::vector<TraceRow>* trace) {
    InnerResult res;
    int stall = 0;
    const std::size_t dim_a = sp.a.size();
    for (int it = 1; it <= cfg.max_outer_iters; ++it) {
        const double f_before = ev.penalized;
        resolve_assignment(pv, cfg, cdf, sp, lambda, sigma, assignment, ev);

        const Gradient grad = penalized_gradient(pv, cdf, sp, assignment, ev, lambda, sigma);
        const double gnorm = grad_inf_norm(grad);
        double accepted_step = 0.0;
        if (gnorm > 0.0) {
            double alpha = cfg.armijo.initial_step / (1.0 + gnorm);
            SplitParameters trial = sp;
            while (alpha >= cfg.armijo.min_step) {
                double dir_dot = 0.0;
                for (std::size_t i = 0; i < dim_a; ++i) {
                    trial.a[i] = std::clamp(sp.a[i] - alpha * grad.d_a[i], -1.0, 1.0);
                    dir_dot += grad.d_a[i] * (trial.a[i] - sp.a[i]);
                }
                for (std::size_t i = 0; i < sp.mu.size(); ++i) {
                    trial.mu[i] = std::clamp(sp.mu[i] - alpha * grad.d_mu[i], -1.0, 1.0);
                    dir_dot += grad.d_mu[i] * (trial.mu[i] - sp.mu[i]);
                }
                if (dir_dot == 0.0) break;  // pinned to the box or flat
                const StateEval trial_ev = evaluate_state(pv, cdf, trial, assignment, lambda, sigma);
                if (trial_ev.penalized <= ev.penalized + cfg.armijo.c1 * dir_dot &&
                    trial_ev.penalized <= ev.penalized) {
                    sp = trial;
                    ev = trial_ev;
                    accepted_step = alpha;
                    break;
                }
                alpha *= cfg.armijo.shrink;
            }
            if (accepted_step == 0.0) res.step_underflow = true;
        }

        res.iterations = it;
        if (trace != nullptr) {
            trace->push_back({start_index, iter_offset + it, ev.penalized, accepted_step, ev.max_shortfall});
        }

        const double improvement = f_before - ev.penalized;
        if (improvement < cfg.tol_rel_objective * std::max(std::abs(f_before), 1e-12)) {
            ++stall;
        } else {
            stall = 0;
        }
        if (stall >= cfg.stall_iters) break;
        if (res.step_underflow) break;  // no usable direction left, keep iterate
    }
    return res;
}

}  // namespace

std::vector<double> gamma_stages(const TrainConfig& cfg) {
    std::vector<double> stages = cfg.gamma_schedule;
    if (stages.empty() || stages.back() != cfg.gamma) stages.push_back(cfg.gamma);
    return stages;
}

SingleStartResult single_start(const Dataset& data, const TrainConfig& cfg, const Topology& topo,
                               std::uint64_t start_seed, int start_index) {
    ProblemView pv{data, topo, cfg.costs, false, {}, {}};
    if (pv.costs.n_classes == 0) pv.costs = CostMatrix::uniform(data.n_classes, cfg.cost_off_diagonal);
    pv.rho.assign(data.n_classes, 0.0);
    for (std::size_t k = 0; k < cfg.rho.size() && k < pv.rho.size(); ++k) pv.rho[k] = cfg.rho[k];
    pv.constrained = std::any_of(pv.rho.begin(), pv.rho.end(), [](double r) { return r > 0.0; });
    pv.target_mass.resize(data.n_classes);
    for (int k = 0; k < data.n_classes; ++k) {
        pv.target_mass[k] = pv.rho[k] * static_cast<double>(data.class_index_sets[k].size());
    }

    Rng rng(start_seed);
    SplitParameters sp = initialize(rng, topo, static_cast<int>(data.p));
    LeafAssignment assignment = LeafAssignment::zeros(data.n_classes, topo.n_leaves);
    // Seed C with the plain exact resolve before the first evaluation.
    {
        const auto q = assignment_costs(topo, SmoothingCdf(gamma_stages(cfg).front()), sp, pv.costs, data);
        const auto sol = solve_assignment(q, data.n_classes, topo.n_leaves, cfg.enforce_coverage);
        assignment = labels_to_assignment(sol.labels, data.n_classes);
    }

    SingleStartResult out;
    out.trace.reserve(cfg.collect_trace ? 64 : 0);
    std::vector<TraceRow>* trace = cfg.collect_trace ? &out.trace : nullptr;

    std::vector<double> lambda(data.n_classes, 0.0);
    double sigma = cfg.aug.penalty_init;
    int iter_offset = 0;

    const auto stages = gamma_stages(cfg);
    for (std::size_t si = 0; si < stages.size(); ++si) {
        const SmoothingCdf cdf(stages[si]);
        const bool final_stage = (si + 1 == stages.size());

        if (!pv.constrained || !final_stage) {
            // Pre-final continuation stages run unconstrained even when rho
            // targets are set; the multiplier loop only runs at the target
            // gamma.
            const bool saved = pv.constrained;
            pv.constrained = false;
            StateEval ev_unc = evaluate_state(pv, cdf, sp, assignment, lambda, sigma);
            const InnerResult ir =
                inner_solve(pv, cfg, cdf, sp, assignment, ev_unc, lambda, sigma, start_index, iter_offset, trace);
            iter_offset += ir.iterations;
            pv.constrained = saved;
            if (final_stage) {
                out.penalized = ev_unc.penalized;
                out.cost = ev_unc.cost;
                out.max_violation = 0.0;
            }
            continue;
        }

        // Augmented-Lagrangian rounds at the final gamma.
        StateEval ev;
        double prev_max_raw = std::numeric_limits<double>::infinity();
        for (int round = 0; round < cfg.aug.outer_rounds; ++round) {
            ev = evaluate_state(pv, cdf, sp, assignment, lambda, sigma);
            const InnerResult ir =
                inner_solve(pv, cfg, cdf, sp, assignment, ev, lambda, sigma, start_index, iter_offset, trace);
            iter_offset += ir.iterations;

            double max_raw = 0.0;
            for (int k = 0; k < data.n_classes; ++k) {
                lambda[k] = std::min(cfg.aug.multiplier_max, std::max(0.0, lambda[k] + sigma * ev.viol_raw[k]));
                max_raw = std::max(max_raw, ev.viol_raw[k]);
            }
            if (ev.max_shortfall <= cfg.aug.feasibility_tol) break;
            if (max_raw > 0.25 * prev_max_raw) sigma *= cfg.aug.penalty_growth;
            prev_max_raw = max_raw;
        }
        ev = evaluate_state(pv, cdf, sp, assignment, lambda, sigma);
        out.penalized = ev.penalized;
        out.cost = ev.cost;
        out.max_violation = ev.max_shortfall;
    }

    out.iterations = iter_offset;
    out.params = std::move(sp);
    out.assignment = std::move(assignment);
    return out;
}

TrainedModel train(const Dataset& data, const TrainConfig& cfg) {
    if (data.n == 0) throw std::invalid_argument("empty training set");
    if (cfg.gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
    if (cfg.n_starts < 1) throw std::invalid_argument("n_starts must be at least 1");
    for (double r : cfg.rho) {
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("rho targets must lie in [0,1]");
    }
    const Topology topo = build_topology(cfg.depth);
    if (cfg.enforce_coverage && data.n_classes > topo.n_leaves) {
        throw infeasible_error("infeasible topology: " + std::to_string(data.n_classes) +
                                    " classes need depth >= ceil(log2(K)) leaves; got depth " +
                                    std::to_string(cfg.depth));
    }

    std::vector<SingleStartResult> results(cfg.n_starts);
    std::vector<std::exception_ptr> errors(cfg.n_starts);
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const int n_threads = std::min(cfg.n_threads > 0 ? cfg.n_threads : hw, cfg.n_starts);

    auto run_range = [&](int worker) {
        for (int s = worker; s < cfg.n_starts; s += n_threads) {
            try {
                results[s] = single_start(data, cfg, topo, cfg.seed + static_cast<std::uint64_t>(s), s);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        }
    };
    if (n_threads == 1) {
        run_range(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(run_range, w);
        for (auto& th : pool) th.join();
    }
    for (int s = 0; s < cfg.n_starts; ++s) {
        if (errors[s]) std::rethrow_exception(errors[s]);
    }

    const bool constrained = std::any_of(cfg.rho.begin(), cfg.rho.end(), [](double r) { return r > 0.0; });
    int best = 0;
    auto key = [&](int s) {
        const auto& r = results[s];
        const bool feasible = !constrained || r.max_violation <= cfg.aug.feasibility_tol;
        return std::make_tuple(feasible ? 0 : 1, feasible ? 0.0 : r.max_violation, r.penalized, s);
    };
    for (int s = 1; s < cfg.n_starts; ++s) {
        if (key(s) < key(best)) best = s;
    }

    TrainedModel model;
    model.topo = topo;
    model.gamma = cfg.gamma;
    model.params = results[best].params;
    model.best_start = best;

    CostMatrix costs = cfg.costs;
    if (costs.n_classes == 0) costs = CostMatrix::uniform(data.n_classes, cfg.cost_off_diagonal);
    const SmoothingCdf cdf(cfg.gamma);

    if (constrained) {
        // Keep the winning start's assignment: it reflects the multiplier
        // pressure that made the start feasible.
        model.assignment = results[best].assignment;
    } else {
        // Exact final resolve so the stored assignment is optimal for the
        // stored cuts; re-solving it again changes nothing.
        const auto q = assignment_costs(topo, cdf, model.params, costs, data);
        const auto sol = solve_assignment(q, data.n_classes, topo.n_leaves, cfg.enforce_coverage);
        model.assignment = labels_to_assignment(sol.labels, data.n_classes);
    }

    model.objective = expected_cost(topo, cdf, model.params, model.assignment, costs, data);
    if (!std::isfinite(model.objective)) throw std::runtime_error("training objective became non-finite");

    const auto mass = class_correct_mass(topo, cdf, model.params, model.assignment, data);
    model.achieved_rates.resize(data.n_classes);
    model.violations.assign(data.n_classes, 0.0);
    std::vector<double> rho(data.n_classes, 0.0);
    for (std::size_t k = 0; k < cfg.rho.size() && k < rho.size(); ++k) rho[k] = cfg.rho[k];
    for (int k = 0; k < data.n_classes; ++k) {
        const double nk = static_cast<double>(data.class_index_sets[k].size());
        model.achieved_rates[k] = nk > 0 ? mass[k] / nk : 0.0;
        model.violations[k] = std::max(0.0, rho[k] - model.achieved_rates[k]);
        if (model.violations[k] > cfg.aug.feasibility_tol) model.constraints_unmet = true;
    }

    model.diagnostics.reserve(cfg.n_starts);
    for (int s = 0; s < cfg.n_starts; ++s) {
        model.diagnostics.push_back(
            {s, results[s].iterations, results[s].penalized, results[s].cost, results[s].max_violation});
    }
    if (cfg.collect_trace) {
        for (int s = 0; s < cfg.n_starts; ++s) {
            model.trace.insert(model.trace.end(), results[s].trace.begin(), results[s].trace.end());
        }
    }
    return model;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream os;
    os << "start,iteration,objective,step,max_violation\n";
    os.precision(17);
    for (const auto& row : trace) {
        os << row.start << ',' << row.iteration << ',' << row.objective << ',' << row.step << ','
           << row.max_violation << '\n';
    }
    return os.str();
}

}  // namespace orct
