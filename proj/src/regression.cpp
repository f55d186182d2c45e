#include "regression.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "gradients.hpp"
#include "rng.hpp"

namespace orct {

namespace {

constexpr double kRidge = 1e-10;

// In-place Cholesky solve of the SPD system A x = b (A row-major n x n).
void cholesky_solve(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) {
                s -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
            }
            if (i == j) {
                if (s <= 0.0) throw numeric_error("leaf-value system lost positive definiteness");
                a[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
            } else {
                a[static_cast<std::size_t>(i) * n + j] = s / a[static_cast<std::size_t>(j) * n + j];
            }
        }
    }
    for (int i = 0; i < n; ++i) {  // forward: L z = b
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * b[k];
        b[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {  // backward: L^T x = z
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= a[static_cast<std::size_t>(k) * n + i] * b[k];
        b[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
}

}  // namespace

double predict_value(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                     const std::vector<double>& phi, const double* x) {
    const auto leaves = leaf_probabilities(topo, cdf, sp, x);
    CompensatedSum s;
    for (int t = 0; t < topo.n_leaves; ++t) s.add(leaves[t] * phi[t]);
    return s.value();
}

double orrt_objective(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                      const std::vector<double>& phi, const Dataset& data) {
    if (data.n == 0) throw std::invalid_argument("empty dataset");
    CompensatedSum acc;
    for (std::size_t i = 0; i < data.n; ++i) {
        const double r = predict_value(topo, cdf, sp, phi, data.row(i)) - data.y_real[i];
        acc.add(r * r);
    }
    const double v = acc.value() / static_cast<double>(data.n);
    if (!std::isfinite(v)) throw numeric_error("regression objective became non-finite");
    return v;
}

std::vector<double> solve_leaf_values(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                      const Dataset& data) {
    if (data.n == 0) throw std::invalid_argument("empty dataset");
    const int L = topo.n_leaves;
    std::vector<double> gram(static_cast<std::size_t>(L) * L, 0.0);
    std::vector<double> rhs(L, 0.0);
    std::vector<CompensatedSum> gram_acc(static_cast<std::size_t>(L) * L);
    std::vector<CompensatedSum> rhs_acc(L);
    for (std::size_t i = 0; i < data.n; ++i) {
        const auto m = leaf_probabilities(topo, cdf, sp, data.row(i));
        for (int s = 0; s < L; ++s) {
            rhs_acc[s].add(m[s] * data.y_real[i]);
            for (int t = s; t < L; ++t) gram_acc[static_cast<std::size_t>(s) * L + t].add(m[s] * m[t]);
        }
    }
    for (int s = 0; s < L; ++s) {
        rhs[s] = rhs_acc[s].value();
        for (int t = s; t < L; ++t) {
            const double v = gram_acc[static_cast<std::size_t>(s) * L + t].value();
            gram[static_cast<std::size_t>(s) * L + t] = v;
            gram[static_cast<std::size_t>(t) * L + s] = v;
        }
    }
    for (int s = 0; s < L; ++s) gram[static_cast<std::size_t>(s) * L + s] += kRidge;
    cholesky_solve(gram, rhs, L);
    return rhs;
}

namespace {

// Gradient of the MSE with respect to (a, mu) at fixed phi. Same two-pass
// structure as the classifier: per point the leaf weights are phi and the
// whole contribution is scaled by 2 * residual / N.
Gradient mse_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                      const std::vector<double>& phi, const Dataset& data) {
    Gradient grad = make_zero_gradient(sp);
    const int nb = topo.n_branch;
    const int total = topo.total_nodes;
    std::vector<double> u(nb + 1), pt(nb + 1), reach(total + 1), cond(total + 1);
    const double inv_n = 1.0 / static_cast<double>(data.n);

    for (std::size_t i = 0; i < data.n; ++i) {
        const double* x = data.row(i);
        for (int t = 1; t <= nb; ++t) {
            u[t] = split_argument(sp, x, t);
            pt[t] = cdf.value(u[t]);
        }
        reach[1] = 1.0;
        for (int t = 1; t <= nb; ++t) {
            reach[2 * t] = reach[t] * pt[t];
            reach[2 * t + 1] = reach[t] * (1.0 - pt[t]);
        }
        for (int leaf = topo.first_leaf(); leaf <= total; ++leaf) cond[leaf] = phi[topo.leaf_offset(leaf)];
        for (int t = nb; t >= 1; --t) cond[t] = pt[t] * cond[2 * t] + (1.0 - pt[t]) * cond[2 * t + 1];
        const double resid = cond[1] - data.y_real[i];
        const double point_scale = 2.0 * resid * inv_n;
        if (point_scale == 0.0) continue;

        for (int t = 1; t <= nb; ++t) {
            const double du =
                point_scale * reach[t] * (cond[2 * t] - cond[2 * t + 1]) * cdf.gamma() * pt[t] * (1.0 - pt[t]);
            if (du == 0.0) continue;
            for (int j = 0; j < sp.p; ++j) {
                grad.d_a[static_cast<std::size_t>(j) * nb + (t - 1)] += du * x[j] / sp.p;
            }
            grad.d_mu[t - 1] -= du;
        }
    }
    return grad;
}

struct RegStartResult {
    SplitParameters params;
    std::vector<double> phi;
    double mse = 0.0;
    int iterations = 0;
    std::vector<TraceRow> trace;
};

RegStartResult regression_start(const Dataset& data, const TrainConfig& cfg, const Topology& topo,
                                std::uint64_t start_seed, int start_index) {
    Rng rng(start_seed);
    SplitParameters sp = initialize(rng, topo, static_cast<int>(data.p));
    std::vector<double> phi;

    RegStartResult out;
    const std::size_t dim_a = sp.a.size();
    int iter_offset = 0;
    for (double gamma : gamma_stages(cfg)) {
        const SmoothingCdf cdf(gamma);
        phi = solve_leaf_values(topo, cdf, sp, data);
        double f = orrt_objective(topo, cdf, sp, phi, data);

        int stall = 0;
        for (int it = 1; it <= cfg.max_outer_iters; ++it) {
            const double f_before = f;

            std::vector<double> phi_new = solve_leaf_values(topo, cdf, sp, data);
            const double f_phi = orrt_objective(topo, cdf, sp, phi_new, data);
            if (f_phi <= f) {
                phi = std::move(phi_new);
                f = f_phi;
            }

            const Gradient grad = mse_gradient(topo, cdf, sp, phi, data);
            double gnorm = 0.0;
            for (double v : grad.d_a) gnorm = std::max(gnorm, std::abs(v));
            for (double v : grad.d_mu) gnorm = std::max(gnorm, std::abs(v));
            double accepted_step = 0.0;
            bool underflow = false;
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
                    if (dir_dot == 0.0) break;
                    const double f_trial = orrt_objective(topo, cdf, trial, phi, data);
                    if (f_trial <= f + cfg.armijo.c1 * dir_dot && f_trial <= f) {
                        sp = trial;
                        f = f_trial;
                        accepted_step = alpha;
                        break;
                    }
                    alpha *= cfg.armijo.shrink;
                }
                underflow = accepted_step == 0.0;
            }

            out.iterations = iter_offset + it;
            if (cfg.collect_trace) out.trace.push_back({start_index, iter_offset + it, f, accepted_step, 0.0});

            if (f_before - f < cfg.tol_rel_objective * std::max(std::abs(f_before), 1e-12)) {
                ++stall;
            } else {
                stall = 0;
            }
            if (stall >= cfg.stall_iters || underflow) break;
        }
        iter_offset = out.iterations;
    }

    // Canonical final inner solve: the stored phi exactly minimizes the MSE
    // for the stored cuts at the target gamma.
    const SmoothingCdf cdf(cfg.gamma);
    phi = solve_leaf_values(topo, cdf, sp, data);
    out.mse = orrt_objective(topo, cdf, sp, phi, data);
    out.params = std::move(sp);
    out.phi = std::move(phi);
    return out;
}

}  // namespace

RegressionModel train_orrt(const Dataset& data, const TrainConfig& cfg) {
    if (data.n == 0) throw std::invalid_argument("empty training set");
    if (data.y_real.size() != data.n) throw std::invalid_argument("regression training needs real-valued targets");
    if (cfg.gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
    if (cfg.n_starts < 1) throw std::invalid_argument("n_starts must be at least 1");
    const Topology topo = build_topology(cfg.depth);

    std::vector<RegStartResult> results(cfg.n_starts);
    std::vector<std::exception_ptr> errors(cfg.n_starts);
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const int n_threads = std::min(cfg.n_threads > 0 ? cfg.n_threads : hw, cfg.n_starts);

    auto run_range = [&](int worker) {
        for (int s = worker; s < cfg.n_starts; s += n_threads) {
            try {
                results[s] = regression_start(data, cfg, topo, cfg.seed + static_cast<std::uint64_t>(s), s);
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

    int best = 0;
    for (int s = 1; s < cfg.n_starts; ++s) {
        if (results[s].mse < results[best].mse) best = s;
    }

    RegressionModel model;
    model.topo = topo;
    model.gamma = cfg.gamma;
    model.params = results[best].params;
    model.phi = results[best].phi;
    model.mse = results[best].mse;
    model.best_start = best;
    model.diagnostics.reserve(cfg.n_starts);
    for (int s = 0; s < cfg.n_starts; ++s) {
        model.diagnostics.push_back({s, results[s].iterations, results[s].mse, results[s].mse, 0.0});
    }
    if (cfg.collect_trace) {
        for (int s = 0; s < cfg.n_starts; ++s) {
            model.trace.insert(model.trace.end(), results[s].trace.begin(), results[s].trace.end());
        }
    }
    return model;
}

}  // namespace orct
