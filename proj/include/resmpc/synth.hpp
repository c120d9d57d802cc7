#pragma once

#include <cstdint>

#include "resmpc/series.hpp"
#include "resmpc/timeutil.hpp"

namespace resmpc {

/// Synthetic hourly inflow generator standing in for an unavailable
/// historical record:
///   q(t) = (base + trend t + yearly and daily sinusoids + anomaly
///           + N(0, noise_sd^2))
/// scaled by dry_winter_factor in December-February and clamped at zero.
/// The yearly sinusoid peaks mid-July so winters are the lean season.
///
/// The optional anomaly term is a slow AR(1) excursion (wet and dry spells
/// lasting ~anomaly_hours). Real inflow records have such regimes, and
/// without them an additive-model fit carries no trend uncertainty: every
/// forecast-based policy collapses onto the nominal one. Default off.
struct SynthSpec {
    int years = 3;
    double base = 100.0;             // m^3/s
    double yearly_amplitude = 0.0;   // m^3/s
    double daily_amplitude = 0.0;    // m^3/s
    double trend = 0.0;              // m^3/s per hour
    double noise_sd = 0.0;           // m^3/s
    double dry_winter_factor = 1.0;  // multiplier for Dec/Jan/Feb
    double anomaly_sd = 0.0;         // m^3/s, stationary spread of the spells
    double anomaly_hours = 168.0;    // correlation time of the spells
    Timestamp start = Timestamp(254208);  // 1999-01-01T00:00:00Z
};

InflowSeries synth_dataset(const SynthSpec& spec, std::uint64_t seed);

}  // namespace resmpc
