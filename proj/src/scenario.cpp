#include "resmpc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "resmpc/errors.hpp"
#include "resmpc/parallel.hpp"
#include "resmpc/rng.hpp"

namespace resmpc {

void ScenarioMatrix::validate() const {
    if (horizon < 1 || count < 1)
        fail(ErrorKind::Validation, "scenario matrix must be at least 1x1");
    if (values.size() != std::size_t(horizon) * std::size_t(count))
        fail(ErrorKind::Validation, "scenario matrix size mismatch");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            fail(ErrorKind::Validation,
                 "scenario matrix entry negative or non-finite");
}

namespace {

inline double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

void sample_column(const AdditiveModel& model,
                   const std::vector<double>& base, double origin_offset,
                   const SampleOptions& options, std::uint64_t column_seed,
                   double* out, int horizon) {
    Rng rng(column_seed);
    const double cp_prob =
        model.train_hours > 0
            ? double(model.changepoints.size()) / double(model.train_hours)
            : 0.0;
    const bool draw_cp = options.future_changepoints && cp_prob > 0.0;

    // Accumulated effect of sampled future changepoints: a rate change
    // delta at time t_c contributes delta * (t - t_c) from t_c onward.
    double extra_rate = 0.0;
    double extra_offset = 0.0;
    for (int i = 0; i < horizon; ++i) {
        const double t = origin_offset + double(i);
        double value = base[std::size_t(i)];
        if (draw_cp && rng.uniform() < cp_prob) {
            const double d = rng.laplace(model.cp_scale);
            extra_rate += d;
            extra_offset -= d * t;
        }
        if (draw_cp) value += extra_rate * t + extra_offset;
        if (options.observation_noise && model.sigma_obs > 0.0)
            value += model.sigma_obs * rng.normal();
        out[i] = clamp_nonneg(value);
    }
}

}  // namespace

ScenarioMatrix sample_scenarios(const AdditiveModel& model, Timestamp origin,
                                int horizon, int count, std::uint64_t seed,
                                const SampleOptions& options) {
    if (horizon < 1 || count < 1)
        fail(ErrorKind::InvalidInput, "horizon and count must be >= 1");
    model.validate();

    const double origin_offset = model.offset_hours(origin);
    std::vector<double> base(std::size_t(horizon), 0.0);
    for (int i = 0; i < horizon; ++i)
        base[std::size_t(i)] = model.predict(origin_offset + double(i));

    ScenarioMatrix matrix;
    matrix.origin = origin;
    matrix.horizon = horizon;
    matrix.count = count;
    matrix.values.resize(std::size_t(horizon) * std::size_t(count));

    auto fill = [&](std::size_t k) {
        sample_column(model, base, origin_offset, options,
                      derive_seed(seed, "scenario-column", k),
                      matrix.column(int(k)), horizon);
    };
    if (count >= 64) {
        parallel_for(std::size_t(count), fill);
    } else {
        for (std::size_t k = 0; k < std::size_t(count); ++k) fill(k);
    }
    return matrix;
}

std::vector<double> nominal_forecast(const AdditiveModel& model,
                                     Timestamp origin, int horizon) {
    SampleOptions off;
    off.observation_noise = false;
    off.future_changepoints = false;
    const auto matrix = sample_scenarios(model, origin, horizon, 1, 0, off);
    return matrix.values;
}

void save_scenario_csv(const ScenarioMatrix& matrix, const std::string& path,
                       const std::vector<double>* nominal) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write scenario file '" + path + "'");
    out << "step";
    if (nominal) out << ",nominal";
    for (int k = 1; k <= matrix.count; ++k) out << ",k" << k;
    out << '\n';
    char buf[64];
    for (int i = 0; i < matrix.horizon; ++i) {
        out << i;
        if (nominal) {
            std::snprintf(buf, sizeof buf, "%.17g", (*nominal)[std::size_t(i)]);
            out << ',' << buf;
        }
        for (int k = 0; k < matrix.count; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", matrix.at(i, k));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace resmpc
