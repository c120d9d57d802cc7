#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "resmpc/additive_model.hpp"
#include "resmpc/reservoir.hpp"
#include "resmpc/scenario.hpp"
#include "resmpc/series.hpp"
#include "resmpc/solver.hpp"

namespace resmpc {

enum class Policy {
    Smpc,             // K sampled scenarios from the refitted additive model
    DmpcClimatology,  // K = 1, daily cyclostationary average of the history
    DmpcProphet,      // K = 1, nominal forecast of the refitted model
    Oracle,           // K = 1, the true future inflow
};

std::string policy_name(Policy p);
Policy parse_policy(const std::string& name);

struct RunOptions {
    Timestamp train_start;  // window W0 = [train_start, sim_start)
    Timestamp sim_start;
    int steps = 0;          // T
    int horizon = 24;       // H
    /// K for the scenario policy; 0 derives it from (epsilon, beta, horizon).
    int scenario_count = 0;
    double epsilon = 0.2;
    double beta = 1e-6;
    std::uint64_t seed = 0;
    int refit_period = 24;  // hours between model refits
    /// Initial volume; NaN = midpoint of [s_min, s_max].
    double initial_volume = std::numeric_limits<double>::quiet_NaN();
    SampleOptions sampling;
    ObjectiveKind objective = ObjectiveKind::SumOfNorms;
    double lambda = 1.0;
    double scale_c = 1e-4;
    SolveOptions solve;
};

struct TrajectoryStep {
    Timestamp time;   // hour being controlled
    double inflow;    // realized q(t) [m^3/s]
    double release;   // applied u(t) [m^3/s]
    double volume;    // s after the step [m^3]
    double level;     // h after the step [m]
    double demand;    // w(t) [m^3/s]
};

struct Trajectory {
    Policy policy;
    Timestamp sim_start;
    double initial_volume = 0.0;
    int scenario_count = 1;  // K actually used
    std::vector<TrajectoryStep> steps;

    long solver_iters_total = 0;
    int solver_iters_max = 0;
    int solves_not_converged = 0;
    int refits = 0;
    int refit_failures = 0;
    /// |s(T) - s(0) - 3600 sum(q - u)| / max|s|, recomputed after the run.
    double mass_balance_error = 0.0;
};

/// Algorithm: at each of T steps, build the policy's scenario matrix over the
/// next H hours, solve the MPC problem, apply the first release against the
/// true inflow, then append the new observation to the expanding window.
/// The mass-balance identity is verified on the finished trajectory.
Trajectory run_receding_horizon(Policy policy, const InflowSeries& truth,
                                const ReservoirConfig& cfg,
                                const FitConfig& fit_cfg,
                                const RunOptions& options);

/// Writes `t,timestamp,q,u,s,h,w` CSV (t = 1..T; s and h are the post-step
/// state).
void save_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace resmpc
