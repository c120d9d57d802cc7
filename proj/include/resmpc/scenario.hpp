#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resmpc/additive_model.hpp"
#include "resmpc/timeutil.hpp"

namespace resmpc {

/// H x K matrix of candidate inflow trajectories [m^3/s], column-major so a
/// scenario is contiguous. Entries are clamped at zero.
struct ScenarioMatrix {
    Timestamp origin;  // first forecast step
    int horizon = 0;   // H
    int count = 0;     // K
    std::vector<double> values;  // size H*K, values[k*H + step]

    double at(int step, int k) const {
        return values[std::size_t(k) * std::size_t(horizon) + std::size_t(step)];
    }
    const double* column(int k) const {
        return values.data() + std::size_t(k) * std::size_t(horizon);
    }
    double* column(int k) {
        return values.data() + std::size_t(k) * std::size_t(horizon);
    }

    void validate() const;
};

struct SampleOptions {
    /// i.i.d. Gaussian observation noise N(0, sigma_obs^2) per step.
    bool observation_noise = true;
    /// Future trend changepoints: Bernoulli(M / train_hours) arrival per
    /// step, magnitude Laplace(0, cp_scale) — the historical frequency and
    /// magnitude of rate changes carried forward.
    bool future_changepoints = true;
};

/// Draws K trajectories of the model extended past its training window.
/// Deterministic given the seed; column k depends only on (seed, k), so
/// columns can be generated in parallel without changing the result.
ScenarioMatrix sample_scenarios(const AdditiveModel& model, Timestamp origin,
                                int horizon, int count, std::uint64_t seed,
                                const SampleOptions& options = {});

/// The noise-free, changepoint-free extension of the model: exactly one
/// column of sample_scenarios with both sampling options disabled.
std::vector<double> nominal_forecast(const AdditiveModel& model,
                                     Timestamp origin, int horizon);

/// Writes `step,k1..kK` CSV; optionally prepends a `nominal` column.
void save_scenario_csv(const ScenarioMatrix& matrix, const std::string& path,
                       const std::vector<double>* nominal = nullptr);

}  // namespace resmpc
