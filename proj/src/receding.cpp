#include "resmpc/receding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "resmpc/errors.hpp"
#include "resmpc/reduce.hpp"
#include "resmpc/rng.hpp"

namespace resmpc {

std::string policy_name(Policy p) {
    switch (p) {
        case Policy::Smpc: return "smpc";
        case Policy::DmpcClimatology: return "dmpc-clim";
        case Policy::DmpcProphet: return "dmpc-prophet";
        case Policy::Oracle: return "oracle";
    }
    return "?";
}

Policy parse_policy(const std::string& name) {
    if (name == "smpc") return Policy::Smpc;
    if (name == "dmpc-clim") return Policy::DmpcClimatology;
    if (name == "dmpc-prophet") return Policy::DmpcProphet;
    if (name == "oracle") return Policy::Oracle;
    fail(ErrorKind::Usage, "unknown policy '" + name +
                               "' (expected smpc, dmpc-clim, dmpc-prophet or "
                               "oracle)");
}

namespace {

ScenarioMatrix single_column(Timestamp origin, std::vector<double> values) {
    ScenarioMatrix m;
    m.origin = origin;
    m.horizon = int(values.size());
    m.count = 1;
    m.values = std::move(values);
    for (double& v : m.values)
        if (v < 0.0) v = 0.0;
    return m;
}

}  // namespace

Trajectory run_receding_horizon(Policy policy, const InflowSeries& truth,
                                const ReservoirConfig& cfg,
                                const FitConfig& fit_cfg,
                                const RunOptions& options) {
    cfg.validate();
    truth.validate();
    if (options.steps < 1)
        fail(ErrorKind::Usage, "steps must be >= 1");
    if (options.horizon < 1)
        fail(ErrorKind::Usage, "horizon must be >= 1");
    if (options.refit_period < 1)
        fail(ErrorKind::Usage, "refit-period must be >= 1");
    if (!(options.sim_start > options.train_start))
        fail(ErrorKind::Usage, "need a non-empty training window before sim-start");

    const std::size_t train_begin = truth.index_of(options.train_start);
    const std::size_t sim_begin = truth.index_of(options.sim_start);
    if (sim_begin <= train_begin)
        fail(ErrorKind::Usage, "training window is empty");
    const std::size_t steps = std::size_t(options.steps);
    const std::size_t need =
        policy == Policy::Oracle
            ? sim_begin + steps + std::size_t(options.horizon) - 1
            : sim_begin + steps;
    if (truth.size() < need)
        fail(ErrorKind::Validation,
             "inflow record too short: have " + std::to_string(truth.size()) +
                 " hours, need " + std::to_string(need));

    const bool uses_model =
        policy == Policy::Smpc || policy == Policy::DmpcProphet;
    const int scenario_count =
        policy == Policy::Smpc
            ? (options.scenario_count > 0
                   ? options.scenario_count
                   : required_scenarios(options.epsilon, options.beta,
                                        options.horizon))
            : 1;

    // Climatology is the long-run historical average: computed once from the
    // initial window, not refitted (the expanding window feeds the additive
    // model only).
    std::vector<double> clim;
    if (policy == Policy::DmpcClimatology) {
        InflowSeries head;
        head.start = options.train_start;
        head.values.assign(truth.values.begin() + std::ptrdiff_t(train_begin),
                           truth.values.begin() + std::ptrdiff_t(sim_begin));
        clim = climatology(head);
    }

    AdditiveModel model;
    bool have_model = false;

    Trajectory traj;
    traj.policy = policy;
    traj.sim_start = options.sim_start;
    traj.scenario_count = scenario_count;
    traj.initial_volume = std::isnan(options.initial_volume)
                              ? 0.5 * (cfg.s_min + cfg.s_max)
                              : options.initial_volume;
    traj.steps.reserve(steps);

    ReservoirState state{options.sim_start, traj.initial_volume};
    std::vector<double> previous_plan;

    for (std::size_t t = 0; t < steps; ++t) {
        const Timestamp now = options.sim_start + std::int64_t(t);

        if (uses_model &&
            (!have_model || std::int64_t(t) % options.refit_period == 0)) {
            InflowSeries window;
            window.start = options.train_start;
            window.values.assign(
                truth.values.begin() + std::ptrdiff_t(train_begin),
                truth.values.begin() + std::ptrdiff_t(sim_begin + t));
            try {
                model = fit_additive_model(window, fit_cfg);
                have_model = true;
                ++traj.refits;
            } catch (const Error&) {
                ++traj.refit_failures;
                if (!have_model) throw;  // no previous model to fall back to
            }
        }

        MpcProblem problem;
        problem.s0 = state.volume;
        problem.demand.resize(std::size_t(options.horizon));
        for (int i = 0; i < options.horizon; ++i)
            problem.demand[std::size_t(i)] = cfg.demand.at(now + i);
        problem.u_min = cfg.u_min;
        problem.u_max = cfg.u_max;
        problem.s_min = cfg.s_min;
        problem.s_max = cfg.s_max;
        problem.scale_c = options.scale_c;
        problem.objective = options.objective;
        problem.lambda = options.lambda;

        switch (policy) {
            case Policy::Smpc:
                problem.scenarios = sample_scenarios(
                    model, now, options.horizon, scenario_count,
                    derive_seed(options.seed, "step", t), options.sampling);
                break;
            case Policy::DmpcProphet:
                problem.scenarios = single_column(
                    now, nominal_forecast(model, now, options.horizon));
                break;
            case Policy::DmpcClimatology: {
                std::vector<double> q(std::size_t(options.horizon));
                for (int i = 0; i < options.horizon; ++i)
                    q[std::size_t(i)] =
                        clim[std::size_t(day_of_year_365(now + i))];
                problem.scenarios = single_column(now, std::move(q));
                break;
            }
            case Policy::Oracle: {
                const auto first = truth.values.begin() +
                                   std::ptrdiff_t(sim_begin + t);
                problem.scenarios = single_column(
                    now, std::vector<double>(first, first + options.horizon));
                break;
            }
        }

        SolveOptions solve_options = options.solve;
        solve_options.warm_start =
            previous_plan.empty() ? nullptr : &previous_plan;
        solve_options.trace = nullptr;
        ControlPlan plan;
        try {
            plan = solve(problem, solve_options);
        } catch (const Error& e) {
            fail(e.kind(), "step " + std::to_string(t + 1) + ": " + e.what());
        }
        traj.solver_iters_total += plan.solver_iters;
        traj.solver_iters_max = std::max(traj.solver_iters_max, plan.solver_iters);
        if (!plan.converged) ++traj.solves_not_converged;

        const double release = plan.u.front();
        const double inflow = truth.values[sim_begin + t];
        state = step_dynamics(state, inflow, release);

        traj.steps.push_back(TrajectoryStep{
            now, inflow, release, state.volume,
            volume_to_level(state.volume, cfg), cfg.demand.at(now)});

        // Warm start for the next hour: shift, repeat the tail entry.
        previous_plan = plan.u;
        previous_plan.erase(previous_plan.begin());
        previous_plan.push_back(previous_plan.back());
    }

    // Mass-balance tripwire: the trajectory must satisfy the conservation
    // identity to accumulation accuracy.
    std::vector<double> net(steps);
    double max_volume = std::abs(traj.initial_volume);
    for (std::size_t t = 0; t < steps; ++t) {
        net[t] = traj.steps[t].inflow - traj.steps[t].release;
        max_volume = std::max(max_volume, std::abs(traj.steps[t].volume));
    }
    const double drift = std::abs(traj.steps.back().volume -
                                  traj.initial_volume - 3600.0 * pairwise_sum(net));
    traj.mass_balance_error = max_volume > 0.0 ? drift / max_volume : drift;
    if (traj.mass_balance_error > 1e-6)
        fail(ErrorKind::Solver,
             "mass balance violated: relative drift " +
                 std::to_string(traj.mass_balance_error));
    return traj;
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write trajectory file '" + path + "'");
    out << "t,timestamp,q,u,s,h,w\n";
    char buf[160];
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
        const auto& s = traj.steps[t];
        std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      t + 1, format_timestamp(s.time).c_str(), s.inflow,
                      s.release, s.volume, s.level, s.demand);
        out << buf;
    }
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace resmpc
