#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resmpc/additive_model.hpp"
#include "resmpc/evaluation.hpp"
#include "resmpc/receding.hpp"
#include "resmpc/reservoir.hpp"
#include "resmpc/series.hpp"

namespace resmpc {

struct MonteCarloOptions {
    int replicates = 50;
    int steps = 720;  // T per replicate
    int horizon = 24;
    int scenario_count = 0;  // 0 = derive from (epsilon, beta, horizon)
    double epsilon = 0.2;
    double beta = 1e-6;
    std::uint64_t seed = 0;
    int refit_period = 24;
    double dry_weight = 1e3;  // c_d of the a-posteriori cost
    double scale_c = 1e-4;
    double initial_volume = std::numeric_limits<double>::quiet_NaN();
    bool keep_curves = true;  // retain per-step cumulative cost curves
};

struct PolicyOutcome {
    double cumulative_cost = 0.0;
    double normalized_cost = 0.0;  // cumulative / oracle (same replicate)
    int dry_hours = 0;
    int deficit_hours = 0;
    double deficit_peak = 0.0;
    double min_level = 0.0;
    std::vector<double> cumulative_curve;  // present when keep_curves
};

struct ReplicateResult {
    int index = 0;
    bool ok = false;
    std::string error;          // set when !ok; the run continues regardless
    bool oracle_floored = false;  // oracle cost below the normalization floor
    // Indexed like MonteCarloReport::policies.
    std::vector<PolicyOutcome> outcomes;
};

struct PolicySummary {
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::vector<double> outliers;  // beyond 1.5 IQR from the quartiles
    double median_dry_hours = 0.0;
    double median_deficit_hours = 0.0;
};

struct MonteCarloReport {
    std::vector<Policy> policies;  // order of outcomes/summaries
    std::vector<ReplicateResult> replicates;
    std::vector<PolicySummary> summaries;  // over normalized cost, ok replicates
    int failed_replicates = 0;
};

/// Draws `replicates` plausible futures from the generator model (noise and
/// future changepoints on, one substream per replicate), plays every policy
/// against each future in receding horizon, and reports costs normalized by
/// the oracle cost of the same replicate. Deterministic given the seed.
///
/// If an oracle cost falls below 1e-9 * steps, that floor is used as the
/// denominator and the replicate is flagged.
MonteCarloReport monte_carlo_compare(const AdditiveModel& generator,
                                     const InflowSeries& history,
                                     const ReservoirConfig& cfg,
                                     const FitConfig& fit_cfg,
                                     const MonteCarloOptions& options);

/// Quartile helper (linear interpolation between order statistics).
double quantile(std::vector<double> values, double p);

}  // namespace resmpc
