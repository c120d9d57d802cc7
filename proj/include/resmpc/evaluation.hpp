#pragma once

#include <vector>

#include "resmpc/receding.hpp"
#include "resmpc/reservoir.hpp"

namespace resmpc {

/// A-posteriori nonlinear penalty for one hour:
///   C_dry = max(h_D - h, 0), C_dmd = max(w - u, 0), J = c_d C_dry + C_dmd.
struct StepCost {
    double total = 0.0;           // J
    double dry = 0.0;             // C_dry [m]
    double demand_deficit = 0.0;  // C_dmd [m^3/s]
};

StepCost nonlinear_cost(double level, double release, double demand,
                        double dry_level, double dry_weight);

/// Per-step and cumulated costs plus the summary metrics of a run.
struct EvaluationRecord {
    std::vector<double> step_cost;        // J(t)
    std::vector<double> dry_cost;         // C_dry(t)
    std::vector<double> deficit_cost;     // C_dmd(t)
    std::vector<double> cumulative_cost;  // running sum of J
    double total_cost = 0.0;

    double min_level = 0.0;   // m
    double max_level = 0.0;   // m
    int dry_hours = 0;        // hours with h < h_D
    int flood_hours = 0;      // hours with h > h_flood
    double deficit_peak = 0.0;  // max(w - u) over the run [m^3/s]
    int deficit_hours = 0;      // hours with u < w
};

EvaluationRecord evaluate_trajectory(const Trajectory& traj,
                                     const ReservoirConfig& cfg,
                                     double dry_weight = 1e3);

}  // namespace resmpc
