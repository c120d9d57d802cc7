#pragma once

#include <span>
#include <vector>

#include "resmpc/scenario.hpp"

namespace resmpc {

/// Sample-complexity bound for scenario optimization:
/// K = ceil( (2/epsilon) (ln(1/beta) + H) ).
int required_scenarios(double epsilon, double beta, int horizon);

enum class ObjectiveKind {
    SumOfNorms,  // c (||s_max - s^k|| + ||s^k - s_min||) + ||u - w||, averaged
    Quadratic,   // sum (s-s_max)^2 + (s-s_min)^2 + lambda (u-w)^2, averaged
};

/// One receding-horizon optimization instance.
struct MpcProblem {
    double s0 = 0.0;                 // initial volume [m^3]
    ScenarioMatrix scenarios;        // H x K candidate inflows
    std::vector<double> demand;      // length H [m^3/s]
    double u_min = 0.0, u_max = 0.0; // release box [m^3/s]
    double s_min = 0.0, s_max = 0.0; // soft volume bounds [m^3]
    double scale_c = 1e-4;           // c, weight of the volume terms
    ObjectiveKind objective = ObjectiveKind::SumOfNorms;
    double lambda = 1.0;             // quadratic demand weight

    void validate() const;
};

struct ControlPlan {
    std::vector<double> u;       // length H, feasible by construction
    double objective_value = 0.0;
    int solver_iters = 0;
    bool converged = false;
};

struct SolveOptions {
    double tol = 1e-9;    // relative objective tolerance target
    int max_iters = 4000; // total iteration budget across smoothing stages
    const std::vector<double>* warm_start = nullptr;  // length H, in [u_min,u_max]
    /// When set, receives the best objective seen after each iteration
    /// (physical units). Non-increasing by construction.
    std::vector<double>* trace = nullptr;
};

/// The scenario sum-of-norms cost in physical units:
///   (1/K) sum_k c (||s_max 1 - s^k||_2 + ||s^k - s_min 1||_2) + ||u - w||_2
/// with s^k propagated through the mass balance. The scenario average uses an
/// order-independent reduction, so duplicating or permuting columns leaves
/// the value unchanged exactly.
double scenario_objective(const MpcProblem& p, std::span<const double> u);

/// The quadratic cost of the traditional formulation, same conventions.
double quadratic_objective(const MpcProblem& p, std::span<const double> u);

/// Dispatches on p.objective.
double problem_objective(const MpcProblem& p, std::span<const double> u);

/// Minimizes the problem objective over the release box. The method is
/// projected accelerated gradient descent on a Huber-smoothed objective with
/// smoothing continuation, followed by a short projected subgradient polish;
/// the returned plan is the best iterate by the true (unsmoothed) objective.
ControlPlan solve(const MpcProblem& p, const SolveOptions& options = {});

}  // namespace resmpc
