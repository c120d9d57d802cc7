#include "resmpc/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "resmpc/errors.hpp"

namespace resmpc {

using nlohmann::json;

void write_monte_carlo_json(const MonteCarloReport& report,
                            const std::string& path) {
    json doc;
    doc["policies"] = json::array();
    for (Policy p : report.policies) doc["policies"].push_back(policy_name(p));
    doc["failed_replicates"] = report.failed_replicates;

    json reps = json::array();
    for (const auto& r : report.replicates) {
        json jr;
        jr["replicate"] = r.index;
        jr["ok"] = r.ok;
        if (!r.ok) jr["error"] = r.error;
        jr["oracle_floored"] = r.oracle_floored;
        if (r.ok) {
            json outs = json::object();
            for (std::size_t i = 0; i < report.policies.size(); ++i) {
                const auto& o = r.outcomes[i];
                outs[policy_name(report.policies[i])] = {
                    {"cumJ", o.cumulative_cost},
                    {"normJ", o.normalized_cost},
                    {"dry_hours", o.dry_hours},
                    {"deficit_hours", o.deficit_hours},
                    {"deficit_peak", o.deficit_peak},
                    {"min_level", o.min_level},
                };
            }
            jr["outcomes"] = std::move(outs);
        }
        reps.push_back(std::move(jr));
    }
    doc["replicates"] = std::move(reps);

    json summaries = json::object();
    for (std::size_t i = 0; i < report.policies.size(); ++i) {
        const auto& s = report.summaries[i];
        summaries[policy_name(report.policies[i])] = {
            {"mean_normJ", s.mean},
            {"median_normJ", s.median},
            {"q1_normJ", s.q1},
            {"q3_normJ", s.q3},
            {"outliers_normJ", s.outliers},
            {"median_dry_hours", s.median_dry_hours},
            {"median_deficit_hours", s.median_deficit_hours},
        };
    }
    doc["summary"] = std::move(summaries);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write report '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

void write_monte_carlo_csv(const MonteCarloReport& report,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write report '" + path + "'");
    out << "replicate,policy,cumJ,normJ,dry_hours,deficit_hours,deficit_peak,"
           "min_level\n";
    char buf[256];
    for (const auto& r : report.replicates) {
        if (!r.ok) continue;
        for (std::size_t i = 0; i < report.policies.size(); ++i) {
            const auto& o = r.outcomes[i];
            std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%d,%d,%.17g,%.17g\n",
                          r.index, policy_name(report.policies[i]).c_str(),
                          o.cumulative_cost, o.normalized_cost, o.dry_hours,
                          o.deficit_hours, o.deficit_peak, o.min_level);
            out << buf;
        }
    }
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

void write_monte_carlo_curves(const MonteCarloReport& report,
                              const std::string& directory) {
    char name[64];
    char buf[256];
    for (const auto& r : report.replicates) {
        if (!r.ok) continue;
        if (r.outcomes.empty() || r.outcomes.front().cumulative_curve.empty())
            fail(ErrorKind::InvalidInput,
                 "report has no cumulative curves (keep_curves was off)");
        std::snprintf(name, sizeof name, "curves_r%03d.csv", r.index);
        const auto path = std::filesystem::path(directory) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out)
            fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
        out << "t,J_smpc,J_dmpc_clim,J_dmpc_prophet,J_oracle\n";
        const std::size_t steps = r.outcomes.front().cumulative_curve.size();
        for (std::size_t t = 0; t < steps; ++t) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n",
                          t + 1, r.outcomes[0].cumulative_curve[t],
                          r.outcomes[1].cumulative_curve[t],
                          r.outcomes[2].cumulative_curve[t],
                          r.outcomes[3].cumulative_curve[t]);
            out << buf;
        }
        if (!out)
            fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
    }
}

}  // namespace resmpc
