#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "resmpc/series.hpp"
#include "resmpc/timeutil.hpp"

namespace resmpc {

/// One Fourier seasonality block: period P [hours], order N, and the
/// 2N harmonic coefficients.
struct SeasonalityBlock {
    double period_hours = 0.0;
    int order = 0;
    std::vector<double> cos_coef;  // a_1..a_N
    std::vector<double> sin_coef;  // b_1..b_N
};

/// Additive trend + seasonality model of an hourly series. Time t is
/// measured in hours since train_start; the trend is piecewise linear with
/// changepoints and the offset corrections tied as gamma_j = -t_j * delta_j,
/// which keeps the trend continuous.
struct AdditiveModel {
    Timestamp train_start;
    std::int64_t train_hours = 0;

    double k0 = 0.0;  // initial growth rate [m^3/s per hour]
    double m0 = 0.0;  // initial offset [m^3/s]
    std::vector<double> changepoints;  // hours since train_start, increasing
    std::vector<double> delta;         // growth-rate changes
    std::vector<double> gamma;         // offset changes (-t_j * delta_j)
    std::vector<SeasonalityBlock> seasonality;

    double sigma_obs = 0.0;  // residual standard deviation [m^3/s]
    double cp_scale = 0.0;   // Laplace scale of historical |delta|

    /// g(t) = (k0 + sum_{t_j <= t} delta_j) t + (m0 + sum gamma_j).
    double trend(double t_hours) const;

    /// Sum of all Fourier blocks at t.
    double seasonal(double t_hours) const;

    double predict(double t_hours) const {
        return trend(t_hours) + seasonal(t_hours);
    }

    double offset_hours(Timestamp t) const {
        return double(t - train_start);
    }

    void validate() const;
};

struct FitConfig {
    int changepoints = 25;  // M
    double changepoint_range_fraction = 0.8;
    /// (period [hours], order) pairs; defaults cover yearly and daily cycles.
    std::vector<std::pair<double, int>> seasonalities = {{8760.0, 10},
                                                         {24.0, 3}};
    double ridge_strength = 1.0;  // penalty on ||delta||^2
};

/// Regularized linear least squares over (k0, m0, delta, harmonics) with
/// gamma tied to delta. The design is linear in every fitted parameter, so
/// this is one symmetric solve; rank problems surface as a Fit error.
AdditiveModel fit_additive_model(const InflowSeries& history,
                                 const FitConfig& cfg);

void save_model(const AdditiveModel& model, const std::string& path);
AdditiveModel load_model(const std::string& path);

}  // namespace resmpc
