#include "resmpc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "resmpc/errors.hpp"
#include "resmpc/reduce.hpp"

namespace resmpc {

int required_scenarios(double epsilon, double beta, int horizon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        fail(ErrorKind::InvalidInput, "epsilon must be in (0, 1]");
    if (!(beta > 0.0 && beta < 1.0))
        fail(ErrorKind::InvalidInput, "beta must be in (0, 1)");
    if (horizon < 1)
        fail(ErrorKind::InvalidInput, "horizon must be >= 1");
    const double k = (2.0 / epsilon) * (std::log(1.0 / beta) + double(horizon));
    // Tolerant ceil: exact-integer cases (e.g. beta = 1/e) must not round up
    // on the last ulp of the logarithm.
    return int(std::ceil(k - 1e-9));
}

void MpcProblem::validate() const {
    scenarios.validate();
    if (std::int64_t(demand.size()) != scenarios.horizon)
        fail(ErrorKind::InvalidInput, "demand length != horizon");
    if (!(u_min < u_max) || !(s_min < s_max))
        fail(ErrorKind::InvalidInput, "require u_min < u_max and s_min < s_max");
    if (!(scale_c > 0.0))
        fail(ErrorKind::InvalidInput, "require scale_c > 0");
    if (!(lambda >= 0.0))
        fail(ErrorKind::InvalidInput, "require lambda >= 0");
    if (!std::isfinite(s0))
        fail(ErrorKind::InvalidInput, "non-finite initial volume");
    for (double w : demand)
        if (!std::isfinite(w))
            fail(ErrorKind::InvalidInput, "non-finite demand");
}

namespace {

// All scenario averages in this module run over columns in a canonical
// order (stable lexicographic sort by column content) and reduce with
// split_mean. The order depends on column values only, so permuting the
// input columns cannot change any result, and a matrix of identical columns
// reduces exactly to the single-column problem. Both are behavioural
// contracts of solve(), not incidental numerics.
std::vector<int> canonical_column_order(const ScenarioMatrix& m) {
    std::vector<int> order(std::size_t(m.count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double* ca = m.column(a);
        const double* cb = m.column(b);
        return std::lexicographical_compare(ca, ca + m.horizon, cb,
                                            cb + m.horizon);
    });
    return order;
}

double demand_norm(const MpcProblem& p, std::span<const double> u) {
    double acc = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        const double d = u[t] - p.demand[t];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace

double scenario_objective(const MpcProblem& p, std::span<const double> u) {
    const int horizon = p.scenarios.horizon;
    const int count = p.scenarios.count;
    if (std::int64_t(u.size()) != horizon)
        fail(ErrorKind::InvalidInput, "control vector length != horizon");

    const auto order = canonical_column_order(p.scenarios);
    std::vector<double> cost(std::size_t(count), 0.0);
    for (int slot = 0; slot < count; ++slot) {
        const double* q = p.scenarios.column(order[std::size_t(slot)]);
        double s = p.s0;
        double above = 0.0, below = 0.0;
        for (int t = 0; t < horizon; ++t) {
            s += 3600.0 * (q[t] - u[std::size_t(t)]);
            const double da = p.s_max - s;
            const double db = s - p.s_min;
            above += da * da;
            below += db * db;
        }
        cost[std::size_t(slot)] = std::sqrt(above) + std::sqrt(below);
    }
    return p.scale_c * split_mean(cost) + demand_norm(p, u);
}

double quadratic_objective(const MpcProblem& p, std::span<const double> u) {
    const int horizon = p.scenarios.horizon;
    const int count = p.scenarios.count;
    if (std::int64_t(u.size()) != horizon)
        fail(ErrorKind::InvalidInput, "control vector length != horizon");

    const auto order = canonical_column_order(p.scenarios);
    std::vector<double> cost(std::size_t(count), 0.0);
    for (int slot = 0; slot < count; ++slot) {
        const double* q = p.scenarios.column(order[std::size_t(slot)]);
        double s = p.s0;
        double acc = 0.0;
        for (int t = 0; t < horizon; ++t) {
            s += 3600.0 * (q[t] - u[std::size_t(t)]);
            const double da = s - p.s_max;
            const double db = s - p.s_min;
            acc += da * da + db * db;
        }
        cost[std::size_t(slot)] = acc;
    }
    const double dn = demand_norm(p, u);
    return split_mean(cost) + p.lambda * dn * dn;
}

double problem_objective(const MpcProblem& p, std::span<const double> u) {
    return p.objective == ObjectiveKind::SumOfNorms ? scenario_objective(p, u)
                                                    : quadratic_objective(p, u);
}

namespace {

// ---------------------------------------------------------------------------
// Internal scaled formulation.
//
// Decision x in [0,1]^H with u = u_min + du x, volumes measured in units of
// ds = s_max - s_min. With cum_t = sum_{tau<=t} x_tau:
//   (s_max - s_{t+1}) / ds = a[t][slot] + rho cum_t
//   (s_{t+1} - s_min) / ds = b[t][slot] - rho cum_t
// and the sum-of-norms objective divided by du is
//   F(x) = cv mean_slots(||A|| + ||B||) + ||x - wt||,   cv = c ds / du.
// The quadratic objective divided by ds^2 is
//   Fq(x) = mean_slots sum_t (A^2 + B^2) + (lambda du^2/ds^2) ||x - wt||^2.
//
// Norm terms are Huber-smoothed with parameter mu. The smoothing changes a
// term only while its residual norm is below mu; volume norms sit far above
// every mu we use, so in practice only the demand term (whose residual does
// approach zero at the optimum) is ever smoothed, and the objective bias is
// at most mu/2 in scaled units.
// ---------------------------------------------------------------------------
class ScaledProblem {
public:
    explicit ScaledProblem(const MpcProblem& p)
        : horizon_(p.scenarios.horizon),
          count_(p.scenarios.count),
          quadratic_(p.objective == ObjectiveKind::Quadratic) {
        du_ = p.u_max - p.u_min;
        ds_ = p.s_max - p.s_min;
        rho_ = 3600.0 * du_ / ds_;
        cv_ = p.scale_c * ds_ / du_;
        lambda_q_ = p.lambda * du_ * du_ / (ds_ * ds_);

        const std::size_t h = std::size_t(horizon_);
        const std::size_t n = h * std::size_t(count_);
        const auto order = canonical_column_order(p.scenarios);

        // t-major layout in canonical slot order: a_[t*K + slot].
        a_.resize(n);
        b_.resize(n);
        for (int slot = 0; slot < count_; ++slot) {
            const double* q = p.scenarios.column(order[std::size_t(slot)]);
            double cum_inflow = 0.0;  // m^3 above the u_min baseline
            for (int t = 0; t < horizon_; ++t) {
                cum_inflow += 3600.0 * (q[t] - p.u_min);
                a_[idx(t, slot)] = (p.s_max - p.s0 - cum_inflow) / ds_;
                b_[idx(t, slot)] = (p.s0 + cum_inflow - p.s_min) / ds_;
            }
        }
        wt_.resize(h);
        for (int t = 0; t < horizon_; ++t)
            wt_[std::size_t(t)] = (p.demand[std::size_t(t)] - p.u_min) / du_;

        cum_.resize(h);
        res_a_.resize(h);
        res_b_.resize(h);
        pregrad_.resize(n);
        cost_smooth_.resize(std::size_t(count_));
        cost_true_.resize(std::size_t(count_));
    }

    int horizon() const { return horizon_; }
    bool quadratic() const { return quadratic_; }

    double to_physical(double f) const {
        return quadratic_ ? f * ds_ * ds_ : f * du_;
    }

    struct Eval {
        double smooth = 0.0;  // F_mu, drives the line search
        double exact = 0.0;   // F_0, drives best-iterate tracking
    };

    Eval eval(std::span<const double> x, double mu, std::vector<double>* grad) {
        const std::size_t h = std::size_t(horizon_);
        const std::size_t count = std::size_t(count_);
        double running = 0.0;
        for (std::size_t t = 0; t < h; ++t) {
            running += x[t];
            cum_[t] = running;
        }

        for (std::size_t slot = 0; slot < count; ++slot) {
            double na2 = 0.0, nb2 = 0.0;
            for (std::size_t t = 0; t < h; ++t) {
                const double ra = a_[t * count + slot] + rho_ * cum_[t];
                const double rb = b_[t * count + slot] - rho_ * cum_[t];
                res_a_[t] = ra;
                res_b_[t] = rb;
                na2 += ra * ra;
                nb2 += rb * rb;
            }
            if (quadratic_) {
                cost_true_[slot] = na2 + nb2;
                cost_smooth_[slot] = na2 + nb2;
                if (grad)
                    for (std::size_t t = 0; t < h; ++t)
                        pregrad_[t * count + slot] =
                            2.0 * rho_ * (res_a_[t] - res_b_[t]);
            } else {
                const double na = std::sqrt(na2);
                const double nb = std::sqrt(nb2);
                cost_true_[slot] = na + nb;
                cost_smooth_[slot] = huber(na, mu) + huber(nb, mu);
                if (grad) {
                    const double inv_a = rho_ / std::max(na, mu);
                    const double inv_b = rho_ / std::max(nb, mu);
                    for (std::size_t t = 0; t < h; ++t)
                        pregrad_[t * count + slot] =
                            res_a_[t] * inv_a - res_b_[t] * inv_b;
                }
            }
        }
        const double mean_smooth = split_mean(cost_smooth_);
        const double mean_true = split_mean(cost_true_);

        double dn2 = 0.0;
        for (std::size_t t = 0; t < h; ++t) {
            const double d = x[t] - wt_[t];
            dn2 += d * d;
        }
        const double dn = std::sqrt(dn2);

        Eval out;
        if (quadratic_) {
            out.smooth = mean_smooth + lambda_q_ * dn2;
            out.exact = mean_true + lambda_q_ * dn2;
        } else {
            out.smooth = cv_ * mean_smooth + huber(dn, mu);
            out.exact = cv_ * mean_true + dn;
        }

        if (grad) {
            // Mean over slots per step, then the chain rule through the
            // cumulative sums: d cum_t / d x_j = 1 for j <= t.
            grad->assign(h, 0.0);
            double suffix = 0.0;
            const double volume_weight = quadratic_ ? 1.0 : cv_;
            for (std::size_t t = h; t-- > 0;) {
                suffix += split_mean(
                    std::span<const double>(pregrad_.data() + t * count, count));
                (*grad)[t] = volume_weight * suffix;
            }
            if (quadratic_) {
                for (std::size_t t = 0; t < h; ++t)
                    (*grad)[t] += 2.0 * lambda_q_ * (x[t] - wt_[t]);
            } else {
                const double inv_d = 1.0 / std::max(dn, mu);
                for (std::size_t t = 0; t < h; ++t)
                    (*grad)[t] += (x[t] - wt_[t]) * inv_d;
            }
        }
        return out;
    }

private:
    static double huber(double r, double mu) {
        return r >= mu ? r : r * r / (2.0 * mu) + 0.5 * mu;
    }

    std::size_t idx(int t, int slot) const {
        return std::size_t(t) * std::size_t(count_) + std::size_t(slot);
    }

    int horizon_;
    int count_;
    bool quadratic_;
    double du_, ds_, rho_, cv_, lambda_q_;
    std::vector<double> a_, b_, wt_;
    // Scratch, reused across iterations.
    std::vector<double> cum_, res_a_, res_b_, pregrad_;
    std::vector<double> cost_smooth_, cost_true_;
};

void project_box(std::vector<double>& x) {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace

ControlPlan solve(const MpcProblem& p, const SolveOptions& options) {
    p.validate();
    const int horizon = p.scenarios.horizon;
    const std::size_t h = std::size_t(horizon);
    ScaledProblem sp(p);

    const double du = p.u_max - p.u_min;
    std::vector<double> x(h);
    if (options.warm_start) {
        if (options.warm_start->size() != h)
            fail(ErrorKind::InvalidInput, "warm start length != horizon");
        for (std::size_t t = 0; t < h; ++t)
            x[t] = ((*options.warm_start)[t] - p.u_min) / du;
    } else {
        // Demand tracking clipped to the box is optimal whenever the volume
        // terms are inactive, which makes it a strong default start.
        for (std::size_t t = 0; t < h; ++t)
            x[t] = (p.demand[t] - p.u_min) / du;
    }
    project_box(x);

    // Smoothing continuation. Only the demand term is ever inside the Huber
    // region, so stopping at 1e-4 sqrt(H) keeps the objective bias below
    // ~1e-6 relative while the smoothed problem stays well conditioned.
    std::vector<double> stages;
    if (sp.quadratic()) {
        stages = {0.0};
    } else {
        const double scale = std::sqrt(double(horizon));
        for (int j = 1; j <= 4; ++j)
            stages.push_back(scale * std::pow(10.0, -j));
    }

    std::vector<double> grad_y(h), y(h), x_prev(h), x_new(h), x_polish(h);
    std::vector<double> x_best = x;
    double f_best = sp.eval(x, stages.front(), nullptr).exact;
    if (!std::isfinite(f_best))
        fail(ErrorKind::Solver, "non-finite objective at the starting point");
    if (options.trace) options.trace->push_back(sp.to_physical(f_best));

    int total_iters = 0;
    bool budget_exhausted = false;
    bool last_stage_converged = false;
    double lipschitz = 1.0;

    // Objective-stagnation window: a stage ends when the incumbent stopped
    // improving at the stage's resolution.
    constexpr int kWindow = 25;
    constexpr int kStageCap = 600;

    for (std::size_t stage = 0; stage < stages.size(); ++stage) {
        const double mu = stages[stage];
        const bool final_stage = stage + 1 == stages.size();
        const double stage_eps =
            final_stage ? std::max(options.tol, 1e-12)
                        : std::max(100.0 * options.tol, 1e-9);

        y = x;
        x_prev = x;
        double momentum = 1.0;
        bool stage_converged = false;
        double window_ref = f_best;
        int window_count = 0;

        for (int inner = 0; inner < kStageCap; ++inner) {
            if (total_iters >= options.max_iters) {
                budget_exhausted = true;
                break;
            }
            const ScaledProblem::Eval at_y = sp.eval(y, mu, &grad_y);
            if (!std::isfinite(at_y.smooth))
                fail(ErrorKind::Solver, "solver diverged (non-finite objective)");

            // Backtracking proximal step from the extrapolated point.
            lipschitz = std::max(lipschitz * 0.95, 1e-12);
            ScaledProblem::Eval at_new;
            for (;;) {
                for (std::size_t t = 0; t < h; ++t)
                    x_new[t] = std::clamp(y[t] - grad_y[t] / lipschitz, 0.0, 1.0);
                at_new = sp.eval(x_new, mu, nullptr);
                double quad_bound = at_y.smooth;
                double dd = 0.0;
                for (std::size_t t = 0; t < h; ++t) {
                    const double d = x_new[t] - y[t];
                    quad_bound += grad_y[t] * d;
                    dd += d * d;
                }
                quad_bound += 0.5 * lipschitz * dd;
                if (at_new.smooth <= quad_bound + 1e-15 * std::abs(quad_bound))
                    break;
                lipschitz *= 2.0;
                if (lipschitz > 1e18)
                    fail(ErrorKind::Solver, "solver diverged (line search)");
            }
            ++total_iters;

            double moved = 0.0;
            for (std::size_t t = 0; t < h; ++t)
                moved = std::max(moved, std::abs(x_new[t] - y[t]));

            double restart_dot = 0.0;
            for (std::size_t t = 0; t < h; ++t)
                restart_dot += (y[t] - x_new[t]) * (x_new[t] - x[t]);
            x_prev = x;
            x = x_new;

            if (at_new.exact < f_best) {
                f_best = at_new.exact;
                x_best = x;
            }
            if (options.trace) options.trace->push_back(sp.to_physical(f_best));

            // Momentum with gradient-based adaptive restart.
            if (restart_dot > 0.0) {
                momentum = 1.0;
                y = x;
            } else {
                const double next =
                    0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
                const double beta = (momentum - 1.0) / next;
                momentum = next;
                for (std::size_t t = 0; t < h; ++t)
                    y[t] = x[t] + beta * (x[t] - x_prev[t]);
            }

            if (moved <= 1e-13) {
                stage_converged = true;
                break;
            }
            if (++window_count >= kWindow) {
                if (window_ref - f_best <=
                    stage_eps * (1.0 + std::abs(f_best))) {
                    stage_converged = true;
                    break;
                }
                window_ref = f_best;
                window_count = 0;
            }
        }
        if (final_stage) last_stage_converged = stage_converged;
        if (budget_exhausted) break;
        x = x_best;  // start the next stage from the incumbent
    }

    // Projected subgradient polish around the incumbent: diminishing steps,
    // keep the best point seen. Trims the residual smoothing bias at the
    // demand kink.
    if (!budget_exhausted && !sp.quadratic()) {
        const double mu_polish = 1e-12 * std::sqrt(double(horizon));
        x_polish = x_best;
        for (int j = 0; j < 20 && total_iters < options.max_iters; ++j) {
            sp.eval(x_polish, mu_polish, &grad_y);
            double gnorm = 0.0;
            for (double g : grad_y) gnorm = std::max(gnorm, std::abs(g));
            if (gnorm == 0.0) break;
            const double step = 1e-4 / (double(j + 1) * gnorm);
            for (std::size_t t = 0; t < h; ++t)
                x_polish[t] =
                    std::clamp(x_polish[t] - step * grad_y[t], 0.0, 1.0);
            const double f = sp.eval(x_polish, mu_polish, nullptr).exact;
            ++total_iters;
            if (f < f_best) {
                f_best = f;
                x_best = x_polish;
            }
            if (options.trace) options.trace->push_back(sp.to_physical(f_best));
        }
    }

    ControlPlan plan;
    plan.u.resize(h);
    for (std::size_t t = 0; t < h; ++t)
        plan.u[t] = std::clamp(p.u_min + du * x_best[t], p.u_min, p.u_max);
    plan.objective_value = problem_objective(p, plan.u);
    plan.solver_iters = total_iters;
    plan.converged = !budget_exhausted && last_stage_converged;
    return plan;
}

}  // namespace resmpc
