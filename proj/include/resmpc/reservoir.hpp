#pragma once

#include <string>
#include <vector>

#include "resmpc/series.hpp"
#include "resmpc/timeutil.hpp"

namespace resmpc {

/// Water demand w(t) [m^3/s], looked up periodically by hour-of-year.
/// Entries may be hourly (8760), daily-expanded, or any other length; the
/// lookup wraps modulo the profile size.
struct DemandProfile {
    std::vector<double> values;

    double at_hour_of_year(int hoy) const {
        return values[std::size_t(hoy) % values.size()];
    }
    double at(Timestamp t) const { return at_hour_of_year(hour_of_year(t)); }

    void validate(double u_max) const;
};

/// Physical and regulatory parameters of the reservoir.
struct ReservoirConfig {
    double s_min = 0.0;        // m^3, lower soft volume bound
    double s_max = 0.0;        // m^3, upper soft volume bound
    double u_min = 0.0;        // m^3/s
    double u_max = 0.0;        // m^3/s
    double surface_area = 0.0; // m^2, level <-> volume conversion
    double s_ref = 0.0;        // m^3, volume at level zero
    double h_dry = -0.20;      // m, dry threshold h_D
    double h_flood = 1.20;     // m
    DemandProfile demand;

    void validate() const;
};

struct ReservoirState {
    Timestamp time;
    double volume = 0.0;  // m^3
};

/// One hour of mass balance: s' = s + 3600 (q - u). Exact arithmetic
/// contract: the result is never clipped, so an infeasible release shows up
/// as a negative volume instead of being masked.
ReservoirState step_dynamics(const ReservoirState& state, double inflow,
                             double release);

double volume_to_level(double volume, const ReservoirConfig& cfg);
double level_to_volume(double level, const ReservoirConfig& cfg);

/// Daily cyclostationary average: 365 day-of-year means across all years in
/// the history (Feb 29 folds into day 59). Requires every day slot to be
/// covered, i.e. at least one full year of data.
std::vector<double> climatology(const InflowSeries& history);

/// Reads `hour_of_year,demand_m3s` (0-based hour) or `day_of_year,demand_m3s`
/// (1-based day, value repeated for all 24 hours) CSV.
DemandProfile load_demand_csv(const std::string& path);

/// Reads a flat `key = value` config file. Relative demand_path is resolved
/// against the config file's directory.
ReservoirConfig load_reservoir_config(const std::string& path);

void save_reservoir_config(const ReservoirConfig& cfg, const std::string& path,
                           const std::string& demand_path);
void save_demand_csv(const DemandProfile& profile, const std::string& path);

}  // namespace resmpc
