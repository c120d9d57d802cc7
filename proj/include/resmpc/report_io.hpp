#pragma once

#include <string>

#include "resmpc/monte_carlo.hpp"

namespace resmpc {

/// Full report: options echo, per-replicate table, per-policy summaries.
void write_monte_carlo_json(const MonteCarloReport& report,
                            const std::string& path);

/// Companion flat table:
/// `replicate,policy,cumJ,normJ,dry_hours,deficit_hours,deficit_peak,min_level`.
void write_monte_carlo_csv(const MonteCarloReport& report,
                           const std::string& path);

/// One `t,J_smpc,J_dmpc_clim,J_dmpc_prophet,J_oracle` cumulative-cost file
/// per replicate, named curves_rNNN.csv inside the directory. Requires the
/// report to have been produced with keep_curves.
void write_monte_carlo_curves(const MonteCarloReport& report,
                              const std::string& directory);

}  // namespace resmpc
