#include "resmpc/reservoir.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "resmpc/errors.hpp"

namespace resmpc {

void DemandProfile::validate(double u_max) const {
    if (values.empty())
        fail(ErrorKind::Validation, "demand profile is empty");
    for (double w : values) {
        if (!std::isfinite(w) || w < 0.0)
            fail(ErrorKind::Validation,
                 "demand profile contains a negative or non-finite value");
        if (w > u_max)
            fail(ErrorKind::Validation,
                 "demand " + std::to_string(w) + " exceeds u_max " +
                     std::to_string(u_max));
    }
}

void ReservoirConfig::validate() const {
    if (!(std::isfinite(s_min) && std::isfinite(s_max) && s_min < s_max))
        fail(ErrorKind::Validation, "require s_min < s_max");
    if (!(std::isfinite(u_min) && std::isfinite(u_max) && u_min >= 0.0 &&
          u_min < u_max))
        fail(ErrorKind::Validation, "require 0 <= u_min < u_max");
    if (!(std::isfinite(surface_area) && surface_area > 0.0))
        fail(ErrorKind::Validation, "require surface_area > 0");
    if (!std::isfinite(s_ref) || !std::isfinite(h_dry) || !std::isfinite(h_flood))
        fail(ErrorKind::Validation, "non-finite level parameters");
    demand.validate(u_max);
}

ReservoirState step_dynamics(const ReservoirState& state, double inflow,
                             double release) {
    if (!std::isfinite(state.volume) || !std::isfinite(inflow) ||
        !std::isfinite(release))
        fail(ErrorKind::InvalidInput, "non-finite input to step_dynamics");
    if (inflow < 0.0)
        fail(ErrorKind::InvalidInput, "negative inflow in step_dynamics");
    return ReservoirState{state.time + 1,
                          state.volume + 3600.0 * (inflow - release)};
}

double volume_to_level(double volume, const ReservoirConfig& cfg) {
    if (!std::isfinite(volume))
        fail(ErrorKind::InvalidInput, "non-finite volume");
    return (volume - cfg.s_ref) / cfg.surface_area;
}

double level_to_volume(double level, const ReservoirConfig& cfg) {
    if (!std::isfinite(level))
        fail(ErrorKind::InvalidInput, "non-finite level");
    return cfg.s_ref + level * cfg.surface_area;
}

std::vector<double> climatology(const InflowSeries& history) {
    std::array<double, 365> sum{};
    std::array<long, 365> count{};
    for (std::size_t i = 0; i < history.size(); ++i) {
        const int d = day_of_year_365(history.time_at(i));
        sum[std::size_t(d)] += history.values[i];
        count[std::size_t(d)] += 1;
    }
    std::vector<double> mean(365);
    for (int d = 0; d < 365; ++d) {
        if (count[std::size_t(d)] == 0)
            fail(ErrorKind::InsufficientData,
                 "climatology requires at least one full year of history");
        mean[std::size_t(d)] = sum[std::size_t(d)] / double(count[std::size_t(d)]);
    }
    return mean;
}

namespace {

struct CsvRow {
    long key;
    double value;
};

std::vector<CsvRow> read_two_column_csv(const std::string& path,
                                        std::string* header_out) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open demand file '" + path + "'");
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line))
        fail(ErrorKind::Parse, "empty demand file '" + path + "'");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    *header_out = line;
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            fail(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                       ": expected 2 fields");
        try {
            rows.push_back(CsvRow{std::stol(line.substr(0, comma)),
                                  std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            fail(ErrorKind::Parse,
                 "line " + std::to_string(line_no) + ": bad row '" + line + "'");
        }
    }
    return rows;
}

}  // namespace

DemandProfile load_demand_csv(const std::string& path) {
    std::string header;
    const auto rows = read_two_column_csv(path, &header);
    if (rows.empty())
        fail(ErrorKind::Parse, "demand file '" + path + "' has no data rows");

    DemandProfile profile;
    if (header == "hour_of_year,demand_m3s") {
        profile.values.assign(8760, -1.0);
        for (const auto& r : rows) {
            if (r.key < 0 || r.key >= 8760)
                fail(ErrorKind::Validation,
                     "hour_of_year " + std::to_string(r.key) + " out of [0,8760)");
            profile.values[std::size_t(r.key)] = r.value;
        }
        for (std::size_t h = 0; h < profile.values.size(); ++h)
            if (profile.values[h] < 0.0)
                fail(ErrorKind::Validation,
                     "demand file missing hour_of_year " + std::to_string(h));
    } else if (header == "day_of_year,demand_m3s") {
        std::vector<double> daily(365, -1.0);
        for (const auto& r : rows) {
            if (r.key < 1 || r.key > 365)
                fail(ErrorKind::Validation,
                     "day_of_year " + std::to_string(r.key) + " out of [1,365]");
            daily[std::size_t(r.key - 1)] = r.value;
        }
        profile.values.reserve(8760);
        for (int d = 0; d < 365; ++d) {
            if (daily[std::size_t(d)] < 0.0)
                fail(ErrorKind::Validation,
                     "demand file missing day_of_year " + std::to_string(d + 1));
            for (int h = 0; h < 24; ++h)
                profile.values.push_back(daily[std::size_t(d)]);
        }
    } else {
        fail(ErrorKind::Parse,
             "demand header must be 'hour_of_year,demand_m3s' or "
             "'day_of_year,demand_m3s', got '" + header + "'");
    }
    return profile;
}

ReservoirConfig load_reservoir_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // Trim.
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Parse, "config line " + std::to_string(line_no) +
                                       ": expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b2 = s.find_first_not_of(" \t");
            if (b2 == std::string::npos) return std::string();
            const auto e2 = s.find_last_not_of(" \t");
            return s.substr(b2, e2 - b2 + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto require = [&](const std::string& key) -> std::string {
        const auto it = kv.find(key);
        if (it == kv.end())
            fail(ErrorKind::Usage, "config '" + path + "' is missing key '" +
                                       key + "'");
        return it->second;
    };
    auto number = [&](const std::string& key, const std::string& text) {
        try {
            return std::stod(text);
        } catch (const std::exception&) {
            fail(ErrorKind::Parse, "config key '" + key +
                                       "' has non-numeric value '" + text + "'");
        }
    };
    auto optional_number = [&](const std::string& key, double fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : number(key, it->second);
    };

    ReservoirConfig cfg;
    cfg.s_min = number("s_min", require("s_min"));
    cfg.s_max = number("s_max", require("s_max"));
    cfg.u_min = number("u_min", require("u_min"));
    cfg.u_max = number("u_max", require("u_max"));
    cfg.surface_area = number("surface_area", require("surface_area"));
    cfg.s_ref = optional_number("s_ref", 0.0);
    cfg.h_dry = optional_number("h_dry", -0.20);
    cfg.h_flood = optional_number("h_flood", 1.20);

    std::filesystem::path demand_path(require("demand_path"));
    if (demand_path.is_relative())
        demand_path = std::filesystem::path(path).parent_path() / demand_path;
    cfg.demand = load_demand_csv(demand_path.string());

    cfg.validate();
    return cfg;
}

void save_reservoir_config(const ReservoirConfig& cfg, const std::string& path,
                           const std::string& demand_path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write config file '" + path + "'");
    char buf[64];
    auto emit = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << key << " = " << buf << '\n';
    };
    emit("s_min", cfg.s_min);
    emit("s_max", cfg.s_max);
    emit("u_min", cfg.u_min);
    emit("u_max", cfg.u_max);
    emit("surface_area", cfg.surface_area);
    emit("s_ref", cfg.s_ref);
    emit("h_dry", cfg.h_dry);
    emit("h_flood", cfg.h_flood);
    out << "demand_path = " << demand_path << '\n';
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

void save_demand_csv(const DemandProfile& profile, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write demand file '" + path + "'");
    out << "hour_of_year,demand_m3s\n";
    char buf[64];
    for (int h = 0; h < 8760; ++h) {
        std::snprintf(buf, sizeof buf, "%.17g", profile.at_hour_of_year(h));
        out << h << ',' << buf << '\n';
    }
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace resmpc
