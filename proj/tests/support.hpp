#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here is deliberately implementation-free: oracles use brute force or
// closed forms so they stay independent of the code paths they check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "resmpc/reservoir.hpp"
#include "resmpc/series.hpp"
#include "resmpc/solver.hpp"
#include "resmpc/timeutil.hpp"

namespace testsupport {

inline resmpc::InflowSeries constant_series(resmpc::Timestamp start,
                                            std::size_t hours, double value) {
    resmpc::InflowSeries s;
    s.start = start;
    s.values.assign(hours, value);
    return s;
}

inline resmpc::InflowSeries series_from(resmpc::Timestamp start,
                                        std::size_t hours,
                                        const std::function<double(double)>& f) {
    resmpc::InflowSeries s;
    s.start = start;
    s.values.reserve(hours);
    for (std::size_t t = 0; t < hours; ++t) s.values.push_back(f(double(t)));
    return s;
}

/// Como-scale reservoir with a constant demand; the workhorse fixture.
inline resmpc::ReservoirConfig como_like_config(double demand = 90.0) {
    resmpc::ReservoirConfig cfg;
    cfg.surface_area = 1.45e8;      // m^2
    cfg.s_ref = 1.45e8;             // level 0 at 1 m of storage
    cfg.h_dry = -0.20;
    cfg.h_flood = 1.20;
    cfg.s_min = resmpc::level_to_volume(cfg.h_dry, cfg);
    cfg.s_max = resmpc::level_to_volume(cfg.h_flood, cfg);
    cfg.u_min = 0.0;
    cfg.u_max = 500.0;
    cfg.demand.values = {demand};
    return cfg;
}

/// Golden-section search for the minimum of a unimodal 1-D function.
inline double golden_section(const std::function<double(double)>& f, double lo,
                             double hi, double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

struct GridResult {
    double objective;
    double slack;  // rigorous bound on (grid minimum - true minimum)
};

/// Exhaustive grid minimization of the sum-of-norms objective over the
/// release box, `points` samples per dimension, H <= 3. Written as explicit
/// nested loops with running partial sums so a 400^3 sweep stays fast. The
/// slack is a Lipschitz bound times the half-diagonal of a grid cell.
inline GridResult grid_oracle(const resmpc::MpcProblem& p, int points) {
    const int horizon = p.scenarios.horizon;
    const int count = p.scenarios.count;
    const double lo = p.u_min, hi = p.u_max;
    const double step = (hi - lo) / double(points - 1);
    const double c = p.scale_c;
    double best = std::numeric_limits<double>::infinity();

    std::vector<double> s1(std::size_t(count), 0.0), s2 = s1;
    std::vector<double> acc_a1 = s1, acc_b1 = s1, acc_a2 = s1, acc_b2 = s1;

    auto column_cost = [&](const std::vector<double>& above,
                           const std::vector<double>& below) {
        double sum = 0.0;
        for (int k = 0; k < count; ++k)
            sum += std::sqrt(above[std::size_t(k)]) +
                   std::sqrt(below[std::size_t(k)]);
        return c * sum / double(count);
    };

    for (int i0 = 0; i0 < points; ++i0) {
        const double u0 = lo + step * double(i0);
        const double d0 = (u0 - p.demand[0]) * (u0 - p.demand[0]);
        for (int k = 0; k < count; ++k) {
            s1[std::size_t(k)] = p.s0 + 3600.0 * (p.scenarios.at(0, k) - u0);
            const double da = p.s_max - s1[std::size_t(k)];
            const double db = s1[std::size_t(k)] - p.s_min;
            acc_a1[std::size_t(k)] = da * da;
            acc_b1[std::size_t(k)] = db * db;
        }
        if (horizon == 1) {
            best = std::min(best, column_cost(acc_a1, acc_b1) + std::sqrt(d0));
            continue;
        }
        for (int i1 = 0; i1 < points; ++i1) {
            const double u1 = lo + step * double(i1);
            const double d1 = d0 + (u1 - p.demand[1]) * (u1 - p.demand[1]);
            for (int k = 0; k < count; ++k) {
                s2[std::size_t(k)] =
                    s1[std::size_t(k)] + 3600.0 * (p.scenarios.at(1, k) - u1);
                const double da = p.s_max - s2[std::size_t(k)];
                const double db = s2[std::size_t(k)] - p.s_min;
                acc_a2[std::size_t(k)] = acc_a1[std::size_t(k)] + da * da;
                acc_b2[std::size_t(k)] = acc_b1[std::size_t(k)] + db * db;
            }
            if (horizon == 2) {
                best = std::min(best,
                                column_cost(acc_a2, acc_b2) + std::sqrt(d1));
                continue;
            }
            for (int i2 = 0; i2 < points; ++i2) {
                const double u2 = lo + step * double(i2);
                const double d2 =
                    d1 + (u2 - p.demand[2]) * (u2 - p.demand[2]);
                double sum = 0.0;
                for (int k = 0; k < count; ++k) {
                    const double s3 = s2[std::size_t(k)] +
                                      3600.0 * (p.scenarios.at(2, k) - u2);
                    const double da = p.s_max - s3;
                    const double db = s3 - p.s_min;
                    sum += std::sqrt(acc_a2[std::size_t(k)] + da * da) +
                           std::sqrt(acc_b2[std::size_t(k)] + db * db);
                }
                best = std::min(best,
                                c * sum / double(count) + std::sqrt(d2));
            }
        }
    }

    // ||L||_2 <= sqrt(H(H+1)/2); each norm term is (c 3600 ||L||)-Lipschitz,
    // the demand term 1-Lipschitz.
    const double l2 = std::sqrt(double(horizon) * double(horizon + 1) / 2.0);
    const double lipschitz = 2.0 * p.scale_c * 3600.0 * l2 + 1.0;
    const double cell_half_diag = 0.5 * step * std::sqrt(double(horizon));
    return GridResult{best, lipschitz * cell_half_diag};
}

/// Scratch directory under the build tree; wiped per construction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() / ("resmpc_" + name);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace testsupport
