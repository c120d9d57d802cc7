#include "resmpc/evaluation.hpp"

#include <cmath>

#include "resmpc/errors.hpp"

namespace resmpc {

StepCost nonlinear_cost(double level, double release, double demand,
                        double dry_level, double dry_weight) {
    if (!std::isfinite(level) || !std::isfinite(release) ||
        !std::isfinite(demand) || !std::isfinite(dry_level))
        fail(ErrorKind::InvalidInput, "non-finite input to nonlinear_cost");
    if (!(dry_weight > 0.0))
        fail(ErrorKind::InvalidInput, "dry weight must be positive");
    StepCost cost;
    cost.dry = dry_level > level ? dry_level - level : 0.0;
    cost.demand_deficit = demand > release ? demand - release : 0.0;
    cost.total = dry_weight * cost.dry + cost.demand_deficit;
    return cost;
}

EvaluationRecord evaluate_trajectory(const Trajectory& traj,
                                     const ReservoirConfig& cfg,
                                     double dry_weight) {
    if (traj.steps.empty())
        fail(ErrorKind::InvalidInput, "empty trajectory");

    EvaluationRecord rec;
    const std::size_t n = traj.steps.size();
    rec.step_cost.reserve(n);
    rec.dry_cost.reserve(n);
    rec.deficit_cost.reserve(n);
    rec.cumulative_cost.reserve(n);
    rec.min_level = traj.steps.front().level;
    rec.max_level = traj.steps.front().level;

    double running = 0.0;
    for (const auto& step : traj.steps) {
        const StepCost cost = nonlinear_cost(step.level, step.release,
                                             step.demand, cfg.h_dry, dry_weight);
        rec.step_cost.push_back(cost.total);
        rec.dry_cost.push_back(cost.dry);
        rec.deficit_cost.push_back(cost.demand_deficit);
        running += cost.total;
        rec.cumulative_cost.push_back(running);

        rec.min_level = std::min(rec.min_level, step.level);
        rec.max_level = std::max(rec.max_level, step.level);
        if (step.level < cfg.h_dry) ++rec.dry_hours;
        if (step.level > cfg.h_flood) ++rec.flood_hours;
        if (step.release < step.demand) {
            ++rec.deficit_hours;
            rec.deficit_peak = std::max(rec.deficit_peak, cost.demand_deficit);
        }
    }
    rec.total_cost = running;
    return rec;
}

}  // namespace resmpc
