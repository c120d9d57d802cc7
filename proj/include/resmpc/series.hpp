#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "resmpc/timeutil.hpp"

namespace resmpc {

/// Hourly inflow record [m^3/s]. Uniform spacing is structural: values[i]
/// belongs to start + i hours, so gaps cannot be represented.
struct InflowSeries {
    Timestamp start;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    Timestamp time_at(std::size_t i) const {
        return start + std::int64_t(i);
    }
    Timestamp end() const { return start + std::int64_t(values.size()); }

    /// Index of the sample at t; throws if t is outside the record.
    std::size_t index_of(Timestamp t) const;

    /// Checks non-emptiness, finiteness and non-negativity.
    void validate() const;
};

/// Reads `timestamp,inflow_m3s` CSV. Rejects malformed rows (with the line
/// number), duplicate timestamps, gaps (reporting the missing range) and
/// negative inflows.
InflowSeries load_inflow_csv(const std::string& path);

void save_inflow_csv(const InflowSeries& series, const std::string& path);

}  // namespace resmpc
