#include "resmpc/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

#include "resmpc/errors.hpp"
#include "resmpc/parallel.hpp"
#include "resmpc/rng.hpp"
#include "resmpc/scenario.hpp"

namespace resmpc {

double quantile(std::vector<double> values, double p) {
    if (values.empty())
        fail(ErrorKind::InvalidInput, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p * double(values.size() - 1);
    const std::size_t lo = std::size_t(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - double(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

MonteCarloReport monte_carlo_compare(const AdditiveModel& generator,
                                     const InflowSeries& history,
                                     const ReservoirConfig& cfg,
                                     const FitConfig& fit_cfg,
                                     const MonteCarloOptions& options) {
    if (options.replicates < 2)
        fail(ErrorKind::Usage, "need at least 2 replicates");
    history.validate();
    cfg.validate();

    MonteCarloReport report;
    report.policies = {Policy::Smpc, Policy::DmpcClimatology,
                       Policy::DmpcProphet, Policy::Oracle};
    report.replicates.resize(std::size_t(options.replicates));

    const Timestamp sim_start = history.end();
    const int future_hours = options.steps + options.horizon;

    parallel_for(std::size_t(options.replicates), [&](std::size_t r) {
        ReplicateResult& result = report.replicates[r];
        result.index = int(r);
        try {
            // The replicate's "true" inflow: one draw from the generator,
            // with observation noise and fresh changepoints, appended to the
            // shared history.
            SampleOptions truth_options;  // both effects on
            const ScenarioMatrix future = sample_scenarios(
                generator, sim_start, future_hours, 1,
                derive_seed(options.seed, "replicate-truth", r), truth_options);

            InflowSeries truth = history;
            truth.values.insert(truth.values.end(), future.values.begin(),
                                future.values.end());

            RunOptions run;
            run.train_start = history.start;
            run.sim_start = sim_start;
            run.steps = options.steps;
            run.horizon = options.horizon;
            run.scenario_count = options.scenario_count;
            run.epsilon = options.epsilon;
            run.beta = options.beta;
            run.refit_period = options.refit_period;
            run.initial_volume = options.initial_volume;
            run.scale_c = options.scale_c;
            run.seed = derive_seed(options.seed, "replicate-run", r);

            std::vector<EvaluationRecord> records;
            records.reserve(report.policies.size());
            for (Policy policy : report.policies) {
                const Trajectory traj =
                    run_receding_horizon(policy, truth, cfg, fit_cfg, run);
                records.push_back(
                    evaluate_trajectory(traj, cfg, options.dry_weight));
            }

            const double oracle_cost = records.back().total_cost;
            const double floor = 1e-9 * double(options.steps);
            result.oracle_floored = oracle_cost < floor;
            const double denom = result.oracle_floored ? floor : oracle_cost;

            result.outcomes.resize(report.policies.size());
            for (std::size_t i = 0; i < report.policies.size(); ++i) {
                PolicyOutcome& out = result.outcomes[i];
                out.cumulative_cost = records[i].total_cost;
                out.normalized_cost = records[i].total_cost / denom;
                out.dry_hours = records[i].dry_hours;
                out.deficit_hours = records[i].deficit_hours;
                out.deficit_peak = records[i].deficit_peak;
                out.min_level = records[i].min_level;
                if (options.keep_curves)
                    out.cumulative_curve = std::move(records[i].cumulative_cost);
            }
            result.ok = true;
        } catch (const Error& e) {
            result.ok = false;
            result.error = e.what();
        }
    });

    for (const auto& r : report.replicates)
        if (!r.ok) ++report.failed_replicates;

    report.summaries.resize(report.policies.size());
    for (std::size_t i = 0; i < report.policies.size(); ++i) {
        std::vector<double> norm, dry, deficit;
        for (const auto& r : report.replicates) {
            if (!r.ok) continue;
            norm.push_back(r.outcomes[i].normalized_cost);
            dry.push_back(double(r.outcomes[i].dry_hours));
            deficit.push_back(double(r.outcomes[i].deficit_hours));
        }
        if (norm.empty()) continue;
        PolicySummary& s = report.summaries[i];
        double sum = 0.0;
        for (double v : norm) sum += v;
        s.mean = sum / double(norm.size());
        s.median = quantile(norm, 0.5);
        s.q1 = quantile(norm, 0.25);
        s.q3 = quantile(norm, 0.75);
        const double iqr = s.q3 - s.q1;
        for (double v : norm)
            if (v < s.q1 - 1.5 * iqr || v > s.q3 + 1.5 * iqr)
                s.outliers.push_back(v);
        std::sort(s.outliers.begin(), s.outliers.end());
        s.median_dry_hours = quantile(dry, 0.5);
        s.median_deficit_hours = quantile(deficit, 0.5);
    }
    return report;
}

}  // namespace resmpc
