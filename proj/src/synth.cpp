#include "resmpc/synth.hpp"

#include <cmath>
#include <numbers>

#include "resmpc/errors.hpp"
#include "resmpc/rng.hpp"

namespace resmpc {

InflowSeries synth_dataset(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.years < 2)
        fail(ErrorKind::InvalidInput, "synth dataset needs years >= 2");
    if (spec.noise_sd < 0.0)
        fail(ErrorKind::InvalidInput, "negative noise_sd");
    if (spec.dry_winter_factor < 0.0)
        fail(ErrorKind::InvalidInput, "negative dry_winter_factor");
    if (spec.anomaly_sd < 0.0 || spec.anomaly_hours <= 0.0)
        fail(ErrorKind::InvalidInput, "bad anomaly parameters");

    const std::int64_t hours = std::int64_t(spec.years) * 8760;
    InflowSeries series;
    series.start = spec.start;
    series.values.reserve(std::size_t(hours));

    Rng rng(derive_seed(seed, "synth-dataset", 0));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    // Peak of the yearly cycle at day ~196 (mid July).
    constexpr double yearly_phase_days = 196.0;

    // AR(1) with the stationary variance spec.anomaly_sd^2.
    const double phi = std::exp(-1.0 / spec.anomaly_hours);
    const double innovation = spec.anomaly_sd * std::sqrt(1.0 - phi * phi);
    double anomaly = 0.0;

    for (std::int64_t t = 0; t < hours; ++t) {
        const Timestamp now = spec.start + t;
        const double doy = double(day_of_year_365(now)) + hour_of_day(now) / 24.0;
        double value = spec.base + spec.trend * double(t);
        value += spec.yearly_amplitude *
                 std::cos(two_pi * (doy - yearly_phase_days) / 365.0);
        value += spec.daily_amplitude * std::sin(two_pi * hour_of_day(now) / 24.0);
        if (spec.anomaly_sd > 0.0) {
            anomaly = phi * anomaly + innovation * rng.normal();
            value += anomaly;
        }
        if (spec.noise_sd > 0.0) value += spec.noise_sd * rng.normal();
        const int month = month_of(now);
        if (month == 12 || month <= 2) value *= spec.dry_winter_factor;
        series.values.push_back(value < 0.0 ? 0.0 : value);
    }
    return series;
}

}  // namespace resmpc
