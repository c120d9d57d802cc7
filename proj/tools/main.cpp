// resmpc - scenario-based MPC experiments for reservoir operation.
//
// Subcommands compose the library into reproducible experiments. Every run
// resolves its parameters up front, executes from that resolved set, and
// records it in <out>/manifest.json; `resmpc replay` re-executes a manifest
// and reproduces the outputs byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "resmpc/additive_model.hpp"
#include "resmpc/errors.hpp"
#include "resmpc/evaluation.hpp"
#include "resmpc/monte_carlo.hpp"
#include "resmpc/receding.hpp"
#include "resmpc/report_io.hpp"
#include "resmpc/reservoir.hpp"
#include "resmpc/scenario.hpp"
#include "resmpc/series.hpp"
#include "resmpc/solver.hpp"
#include "resmpc/synth.hpp"
#include "resmpc/timeutil.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace resmpc;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
            .count();
    return format_timestamp(Timestamp(secs / 3600)) +
           " (+" + std::to_string(secs % 3600) + "s)";
}

fs::path prepare_out_dir(const std::string& out) {
    if (out.empty()) fail(ErrorKind::Usage, "--out is required");
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory '" + out + "'");
    return dir;
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const json& params, const json& results) {
    json doc;
    doc["tool"] = "resmpc";
    doc["version"] = kVersion;
    doc["created_at"] = now_iso8601();
    doc["subcommand"] = subcommand;
    doc["params"] = params;
    doc["results"] = results;
    std::ofstream f(out_dir / "manifest.json", std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot write manifest");
    f << doc.dump(2) << '\n';
}

std::string absolute_path(const std::string& p) {
    return fs::absolute(fs::path(p)).lexically_normal().string();
}

std::pair<double, int> parse_seasonality(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        fail(ErrorKind::Usage,
             "--seasonality expects PERIOD_HOURS:ORDER, got '" + text + "'");
    try {
        return {std::stod(text.substr(0, colon)),
                std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        fail(ErrorKind::Usage, "bad --seasonality value '" + text + "'");
    }
}

FitConfig fit_config_from(const json& p) {
    FitConfig cfg;
    cfg.changepoints = p.at("changepoints").get<int>();
    cfg.changepoint_range_fraction = p.at("cp_range_fraction").get<double>();
    cfg.ridge_strength = p.at("ridge").get<double>();
    cfg.seasonalities.clear();
    for (const auto& s : p.at("seasonalities"))
        cfg.seasonalities.emplace_back(s.at(0).get<double>(), s.at(1).get<int>());
    return cfg;
}

InflowSeries slice_series(const InflowSeries& full, const json& p,
                          const char* start_key, const char* end_key) {
    std::size_t lo = 0;
    std::size_t hi = full.size();
    if (p.contains(start_key) && !p.at(start_key).is_null())
        lo = full.index_of(parse_timestamp(p.at(start_key).get<std::string>()));
    if (p.contains(end_key) && !p.at(end_key).is_null()) {
        const Timestamp end = parse_timestamp(p.at(end_key).get<std::string>());
        hi = end == full.end() ? full.size() : full.index_of(end);
    }
    if (lo >= hi)
        fail(ErrorKind::Usage, "empty series window requested");
    InflowSeries out;
    out.start = full.time_at(lo);
    out.values.assign(full.values.begin() + std::ptrdiff_t(lo),
                      full.values.begin() + std::ptrdiff_t(hi));
    return out;
}

// --------------------------------------------------------------------------
// synth
// --------------------------------------------------------------------------

void execute_synth(const json& p, const fs::path& out_dir) {
    SynthSpec spec;
    spec.years = p.at("years").get<int>();
    spec.base = p.at("base").get<double>();
    spec.yearly_amplitude = p.at("yearly_amp").get<double>();
    spec.daily_amplitude = p.at("daily_amp").get<double>();
    spec.trend = p.at("trend").get<double>();
    spec.noise_sd = p.at("noise_sd").get<double>();
    spec.dry_winter_factor = p.at("dry_winter_factor").get<double>();
    spec.anomaly_sd = p.value("anomaly_sd", 0.0);
    spec.anomaly_hours = p.value("anomaly_hours", 168.0);
    spec.start = parse_timestamp(p.at("start").get<std::string>());
    const auto series = synth_dataset(spec, p.at("seed").get<std::uint64_t>());
    save_inflow_csv(series, (out_dir / "inflow.csv").string());
    write_manifest(out_dir, "synth", p,
                   json{{"hours", series.size()},
                        {"first", format_timestamp(series.start)},
                        {"last", format_timestamp(series.end() - 1)}});
    std::cout << "wrote " << series.size() << " hours to "
              << (out_dir / "inflow.csv").string() << '\n';
}

// --------------------------------------------------------------------------
// fit
// --------------------------------------------------------------------------

void execute_fit(const json& p, const fs::path& out_dir) {
    const auto full = load_inflow_csv(p.at("inflow").get<std::string>());
    const auto window = slice_series(full, p, "train_start", "train_end");
    const FitConfig cfg = fit_config_from(p);
    const AdditiveModel model = fit_additive_model(window, cfg);
    save_model(model, (out_dir / "model.txt").string());

    double delta_norm = 0.0;
    for (double d : model.delta) delta_norm += d * d;
    json blocks = json::array();
    for (const auto& b : model.seasonality) {
        double coef_norm = 0.0;
        for (double c : b.cos_coef) coef_norm += c * c;
        for (double c : b.sin_coef) coef_norm += c * c;
        blocks.push_back(json{{"period_hours", b.period_hours},
                              {"order", b.order},
                              {"coef_norm", std::sqrt(coef_norm)}});
    }
    const json diagnostics{{"residual_std", model.sigma_obs},
                           {"cp_scale", model.cp_scale},
                           {"k0", model.k0},
                           {"m0", model.m0},
                           {"delta_norm", std::sqrt(delta_norm)},
                           {"seasonality", blocks},
                           {"train_hours", model.train_hours}};
    std::ofstream diag(out_dir / "fit_diagnostics.json", std::ios::binary);
    if (!diag) fail(ErrorKind::Io, "cannot write fit diagnostics");
    diag << diagnostics.dump(2) << '\n';

    write_manifest(out_dir, "fit", p, diagnostics);
    std::cout << "fitted " << model.train_hours << " hours, residual std "
              << model.sigma_obs << '\n';
}

// --------------------------------------------------------------------------
// forecast
// --------------------------------------------------------------------------

void execute_forecast(const json& p, const fs::path& out_dir) {
    const AdditiveModel model = load_model(p.at("model").get<std::string>());
    const Timestamp origin =
        p.at("origin").is_null()
            ? model.train_start + model.train_hours
            : parse_timestamp(p.at("origin").get<std::string>());
    const int horizon = p.at("horizon").get<int>();
    if (horizon < 1) fail(ErrorKind::Usage, "--horizon must be >= 1");
    int count = p.at("scenarios").get<int>();
    if (count < 0) fail(ErrorKind::Usage, "--scenarios must be >= 0");
    if (count == 0)
        count = required_scenarios(p.at("epsilon").get<double>(),
                                   p.at("beta").get<double>(), horizon);
    SampleOptions options;
    options.observation_noise = p.at("noise").get<bool>();
    options.future_changepoints = p.at("future_changepoints").get<bool>();

    const auto matrix =
        sample_scenarios(model, origin, horizon, count,
                         p.at("seed").get<std::uint64_t>(), options);
    const auto nominal = nominal_forecast(model, origin, horizon);
    save_scenario_csv(matrix, (out_dir / "scenarios.csv").string(), &nominal);
    write_manifest(out_dir, "forecast", p,
                   json{{"scenario_count", count},
                        {"origin", format_timestamp(origin)}});
    std::cout << "wrote " << horizon << "x" << count << " scenario matrix\n";
}

// --------------------------------------------------------------------------
// run
// --------------------------------------------------------------------------

RunOptions run_options_from(const json& p, const ReservoirConfig& cfg,
                            const InflowSeries& series) {
    RunOptions run;
    run.sim_start = parse_timestamp(p.at("sim_start").get<std::string>());
    run.train_start = p.at("train_start").is_null()
                          ? series.start
                          : parse_timestamp(p.at("train_start").get<std::string>());
    if (!p.at("train_end").is_null()) {
        const Timestamp end = parse_timestamp(p.at("train_end").get<std::string>());
        if (end != run.sim_start)
            fail(ErrorKind::Usage,
                 "--train-end must equal --sim-start (the window then expands "
                 "with observations)");
    }
    run.steps = p.at("steps").get<int>();
    run.horizon = p.at("horizon").get<int>();
    run.scenario_count = p.at("scenarios").get<int>();
    run.epsilon = p.at("epsilon").get<double>();
    run.beta = p.at("beta").get<double>();
    run.seed = p.at("seed").get<std::uint64_t>();
    run.refit_period = p.at("refit_period").get<int>();
    if (!p.at("s0_level").is_null())
        run.initial_volume =
            level_to_volume(p.at("s0_level").get<double>(), cfg);
    run.sampling.observation_noise = p.at("noise").get<bool>();
    run.sampling.future_changepoints = p.at("future_changepoints").get<bool>();
    const std::string objective = p.at("objective").get<std::string>();
    if (objective == "norms")
        run.objective = ObjectiveKind::SumOfNorms;
    else if (objective == "quadratic")
        run.objective = ObjectiveKind::Quadratic;
    else
        fail(ErrorKind::Usage, "--objective must be norms or quadratic");
    run.lambda = p.at("lambda").get<double>();
    run.scale_c = p.at("c").get<double>();
    return run;
}

void execute_run(const json& p, const fs::path& out_dir) {
    const ReservoirConfig cfg =
        load_reservoir_config(p.at("config").get<std::string>());
    const InflowSeries series =
        load_inflow_csv(p.at("inflow").get<std::string>());
    const Policy policy = parse_policy(p.at("policy").get<std::string>());
    const RunOptions run = run_options_from(p, cfg, series);

    const Trajectory traj =
        run_receding_horizon(policy, series, cfg, fit_config_from(p), run);
    save_trajectory_csv(traj, (out_dir / "trajectory.csv").string());

    const double dry_weight = p.at("dry_weight").get<double>();
    const EvaluationRecord rec = evaluate_trajectory(traj, cfg, dry_weight);
    {
        std::ofstream costs(out_dir / "costs.csv", std::ios::binary);
        if (!costs) fail(ErrorKind::Io, "cannot write costs.csv");
        costs << "t,J,C_dry,C_dmd,cumJ\n";
        char buf[160];
        for (std::size_t t = 0; t < rec.step_cost.size(); ++t) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n",
                          t + 1, rec.step_cost[t], rec.dry_cost[t],
                          rec.deficit_cost[t], rec.cumulative_cost[t]);
            costs << buf;
        }
    }
    const json evaluation{{"total_cost", rec.total_cost},
                          {"dry_hours", rec.dry_hours},
                          {"flood_hours", rec.flood_hours},
                          {"deficit_hours", rec.deficit_hours},
                          {"deficit_peak", rec.deficit_peak},
                          {"min_level", rec.min_level},
                          {"max_level", rec.max_level},
                          {"dry_weight", dry_weight}};
    {
        std::ofstream f(out_dir / "evaluation.json", std::ios::binary);
        if (!f) fail(ErrorKind::Io, "cannot write evaluation.json");
        f << evaluation.dump(2) << '\n';
    }

    const json results{{"scenario_count", traj.scenario_count},
                       {"initial_volume", traj.initial_volume},
                       {"solver_iters_total", traj.solver_iters_total},
                       {"solver_iters_max", traj.solver_iters_max},
                       {"solves_not_converged", traj.solves_not_converged},
                       {"refits", traj.refits},
                       {"refit_failures", traj.refit_failures},
                       {"mass_balance_error", traj.mass_balance_error},
                       {"evaluation", evaluation}};
    write_manifest(out_dir, "run", p, results);
    std::cout << policy_name(policy) << ": " << traj.steps.size()
              << " steps, K=" << traj.scenario_count << ", cumulative cost "
              << rec.total_cost << '\n';
}

// --------------------------------------------------------------------------
// montecarlo
// --------------------------------------------------------------------------

void execute_montecarlo(const json& p, const fs::path& out_dir) {
    const ReservoirConfig cfg =
        load_reservoir_config(p.at("config").get<std::string>());
    const InflowSeries full =
        load_inflow_csv(p.at("inflow").get<std::string>());
    const InflowSeries history =
        slice_series(full, p, "train_start", "train_end");
    const FitConfig fit_cfg = fit_config_from(p);
    const AdditiveModel generator = fit_additive_model(history, fit_cfg);

    MonteCarloOptions options;
    options.replicates = p.at("replicates").get<int>();
    options.steps = p.at("steps").get<int>();
    options.horizon = p.at("horizon").get<int>();
    options.scenario_count = p.at("scenarios").get<int>();
    options.epsilon = p.at("epsilon").get<double>();
    options.beta = p.at("beta").get<double>();
    options.seed = p.at("seed").get<std::uint64_t>();
    options.refit_period = p.at("refit_period").get<int>();
    options.dry_weight = p.at("dry_weight").get<double>();
    options.scale_c = p.at("c").get<double>();
    options.keep_curves = p.at("curves").get<bool>();
    if (!p.at("s0_level").is_null())
        options.initial_volume =
            level_to_volume(p.at("s0_level").get<double>(), cfg);

    const MonteCarloReport report =
        monte_carlo_compare(generator, history, cfg, fit_cfg, options);

    write_monte_carlo_json(report, (out_dir / "report.json").string());
    write_monte_carlo_csv(report, (out_dir / "report.csv").string());
    if (options.keep_curves)
        write_monte_carlo_curves(report, out_dir.string());

    json summary = json::object();
    for (std::size_t i = 0; i < report.policies.size(); ++i)
        summary[policy_name(report.policies[i])] = {
            {"mean_normJ", report.summaries[i].mean},
            {"median_normJ", report.summaries[i].median}};
    write_manifest(out_dir, "montecarlo", p,
                   json{{"failed_replicates", report.failed_replicates},
                        {"summary", summary}});

    for (const auto& r : report.replicates)
        if (!r.ok)
            std::cerr << "replicate " << r.index << " failed: " << r.error
                      << '\n';
    std::cout << "mean normalized cost:";
    for (std::size_t i = 0; i < report.policies.size(); ++i)
        std::cout << ' ' << policy_name(report.policies[i]) << '='
                  << report.summaries[i].mean;
    std::cout << '\n';
}

// --------------------------------------------------------------------------
// replay
// --------------------------------------------------------------------------

void execute_replay(const std::string& manifest_path, const fs::path& out_dir) {
    std::ifstream f(manifest_path);
    if (!f) fail(ErrorKind::Io, "cannot open manifest '" + manifest_path + "'");
    json doc;
    try {
        f >> doc;
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, "bad manifest: " + std::string(e.what()));
    }
    const std::string sub = doc.at("subcommand").get<std::string>();
    const json& params = doc.at("params");
    if (sub == "synth") execute_synth(params, out_dir);
    else if (sub == "fit") execute_fit(params, out_dir);
    else if (sub == "forecast") execute_forecast(params, out_dir);
    else if (sub == "run") execute_run(params, out_dir);
    else if (sub == "montecarlo") execute_montecarlo(params, out_dir);
    else fail(ErrorKind::Usage, "manifest has unknown subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-based MPC experiments for reservoir operation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string out;
    std::uint64_t seed = 0;

    // synth --------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic inflow CSV");
    int sy_years = 3;
    double sy_base = 100.0, sy_yearly = 0.0, sy_daily = 0.0, sy_trend = 0.0;
    double sy_noise = 0.0, sy_winter = 1.0;
    double sy_anomaly_sd = 0.0, sy_anomaly_hours = 168.0;
    std::string sy_start = "1999-01-01T00:00:00Z";
    synth->add_option("--years", sy_years, "dataset length in years");
    synth->add_option("--base", sy_base, "baseline inflow [m3/s]");
    synth->add_option("--yearly-amp", sy_yearly, "yearly sinusoid amplitude");
    synth->add_option("--daily-amp", sy_daily, "daily sinusoid amplitude");
    synth->add_option("--trend", sy_trend, "linear trend [m3/s per hour]");
    synth->add_option("--noise-sd", sy_noise, "Gaussian noise std dev");
    synth->add_option("--dry-winter-factor", sy_winter,
                      "Dec-Feb multiplicative factor");
    synth->add_option("--anomaly-sd", sy_anomaly_sd,
                      "stationary spread of slow wet/dry spells");
    synth->add_option("--anomaly-hours", sy_anomaly_hours,
                      "correlation time of the spells");
    synth->add_option("--start", sy_start, "first timestamp");
    synth->add_option("--seed", seed, "random seed");
    synth->add_option("--out", out, "output directory")->required();

    // fit ----------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit the additive model to inflow data");
    std::string fit_inflow, fit_train_start, fit_train_end;
    int fit_cp = 25;
    double fit_cp_range = 0.8, fit_ridge = 1.0;
    std::vector<std::string> fit_seas;
    fit->add_option("--inflow", fit_inflow, "inflow CSV")->required();
    fit->add_option("--train-start", fit_train_start,
                    "window start (default: series start)");
    fit->add_option("--train-end", fit_train_end,
                    "window end, exclusive (default: series end)");
    fit->add_option("--changepoints", fit_cp, "number of trend changepoints");
    fit->add_option("--cp-range-fraction", fit_cp_range,
                    "fraction of the window carrying changepoints");
    fit->add_option("--seasonality", fit_seas,
                    "PERIOD_HOURS:ORDER (repeatable; default 8760:10 and 24:3)");
    fit->add_option("--ridge", fit_ridge, "ridge strength on the rate changes");
    fit->add_option("--out", out, "output directory")->required();

    // forecast -------------------------------------------------------------
    auto* forecast = app.add_subcommand("forecast", "sample a scenario matrix");
    std::string fc_model, fc_origin;
    int fc_horizon = 24, fc_scenarios = 0;
    double fc_epsilon = 0.2, fc_beta = 1e-6;
    bool fc_no_noise = false, fc_no_cp = false;
    forecast->add_option("--model", fc_model, "model file from fit")->required();
    forecast->add_option("--origin", fc_origin,
                         "first forecast hour (default: end of training)");
    forecast->add_option("--horizon", fc_horizon, "steps ahead (H)");
    forecast->add_option("--scenarios", fc_scenarios,
                         "scenario count K (0 = derive from epsilon/beta)");
    forecast->add_option("--epsilon", fc_epsilon, "violation fraction");
    forecast->add_option("--beta", fc_beta, "infeasibility probability");
    forecast->add_flag("--no-noise", fc_no_noise, "disable observation noise");
    forecast->add_flag("--no-future-changepoints", fc_no_cp,
                       "disable sampled trend changepoints");
    forecast->add_option("--seed", seed, "random seed");
    forecast->add_option("--out", out, "output directory")->required();

    // run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "receding-horizon simulation");
    std::string run_policy, run_config, run_inflow;
    std::string run_train_start, run_train_end, run_sim_start;
    int run_steps = 0, run_horizon = 24, run_scenarios = 0, run_refit = 24;
    double run_epsilon = 0.2, run_beta = 1e-6, run_lambda = 1.0, run_c = 1e-4;
    double run_dry_weight = 1e3;
    std::string run_objective = "norms";
    double run_s0_level = 0.0;
    bool run_no_noise = false, run_no_cp = false;
    int run_cp = 25;
    double run_cp_range = 0.8, run_ridge = 1.0;
    std::vector<std::string> run_seas;
    run->add_option("--policy", run_policy,
                    "smpc | dmpc-clim | dmpc-prophet | oracle")
        ->required();
    run->add_option("--config", run_config, "reservoir config file")->required();
    run->add_option("--inflow", run_inflow, "inflow CSV")->required();
    run->add_option("--train-start", run_train_start,
                    "training window start (default: series start)");
    run->add_option("--train-end", run_train_end,
                    "training window end; must equal --sim-start");
    run->add_option("--sim-start", run_sim_start, "simulation start")->required();
    run->add_option("--steps", run_steps, "simulation steps T")->required();
    run->add_option("--horizon", run_horizon, "prediction horizon H");
    run->add_option("--epsilon", run_epsilon, "violation fraction");
    run->add_option("--beta", run_beta, "infeasibility probability");
    run->add_option("--scenarios", run_scenarios,
                    "scenario count K (0 = derive from epsilon/beta)");
    run->add_option("--seed", seed, "random seed");
    run->add_option("--refit-period", run_refit, "hours between model refits");
    auto* run_s0 = run->add_option("--s0-level", run_s0_level,
                                   "initial level [m] (default: mid volume)");
    run->add_option("--objective", run_objective, "norms | quadratic");
    run->add_option("--lambda", run_lambda, "quadratic demand weight");
    run->add_option("--c", run_c, "volume-term scaling of the norm objective");
    run->add_option("--dry-weight", run_dry_weight,
                    "c_d of the a-posteriori cost");
    run->add_flag("--no-noise", run_no_noise, "disable scenario noise");
    run->add_flag("--no-future-changepoints", run_no_cp,
                  "disable sampled trend changepoints");
    run->add_option("--changepoints", run_cp, "fit: changepoint count");
    run->add_option("--cp-range-fraction", run_cp_range, "fit: changepoint span");
    run->add_option("--seasonality", run_seas, "fit: PERIOD_HOURS:ORDER");
    run->add_option("--ridge", run_ridge, "fit: ridge strength");
    run->add_option("--out", out, "output directory")->required();

    // montecarlo -------------------------------------------------------------
    auto* mc =
        app.add_subcommand("montecarlo", "replicate-level policy comparison");
    std::string mc_config, mc_inflow, mc_train_start, mc_train_end;
    int mc_replicates = 50, mc_steps = 720, mc_horizon = 24, mc_scenarios = 0;
    int mc_refit = 24;
    double mc_epsilon = 0.2, mc_beta = 1e-6, mc_dry_weight = 1e3, mc_c = 1e-4;
    double mc_s0_level = 0.0;
    bool mc_no_curves = false;
    int mc_cp = 25;
    double mc_cp_range = 0.8, mc_ridge = 1.0;
    std::vector<std::string> mc_seas;
    mc->add_option("--config", mc_config, "reservoir config file")->required();
    mc->add_option("--inflow", mc_inflow, "historical inflow CSV")->required();
    mc->add_option("--train-start", mc_train_start,
                   "history window start (default: series start)");
    mc->add_option("--train-end", mc_train_end,
                   "history window end (default: series end; replicate futures "
                   "start here)");
    mc->add_option("--replicates", mc_replicates, "number of replicates");
    mc->add_option("--steps", mc_steps, "simulated hours per replicate");
    mc->add_option("--horizon", mc_horizon, "prediction horizon H");
    mc->add_option("--epsilon", mc_epsilon, "violation fraction");
    mc->add_option("--beta", mc_beta, "infeasibility probability");
    mc->add_option("--scenarios", mc_scenarios,
                   "scenario count K (0 = derive from epsilon/beta)");
    mc->add_option("--seed", seed, "random seed");
    mc->add_option("--refit-period", mc_refit, "hours between model refits");
    mc->add_option("--dry-weight", mc_dry_weight, "c_d of the a-posteriori cost");
    mc->add_option("--c", mc_c, "volume-term scaling of the norm objective");
    auto* mc_s0 = mc->add_option("--s0-level", mc_s0_level,
                                 "initial level [m] (default: mid volume)");
    mc->add_flag("--no-curves", mc_no_curves,
                 "skip per-replicate cumulative cost curves");
    mc->add_option("--changepoints", mc_cp, "fit: changepoint count");
    mc->add_option("--cp-range-fraction", mc_cp_range, "fit: changepoint span");
    mc->add_option("--seasonality", mc_seas, "fit: PERIOD_HOURS:ORDER");
    mc->add_option("--ridge", mc_ridge, "fit: ridge strength");
    mc->add_option("--out", out, "output directory")->required();

    // replay -----------------------------------------------------------------
    auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
    std::string replay_manifest;
    replay->add_option("manifest", replay_manifest, "manifest.json path")
        ->required();
    replay->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        auto seasonality_list = [](const std::vector<std::string>& flags) {
            json list = json::array();
            if (flags.empty()) {
                list.push_back(json::array({8760.0, 10}));
                list.push_back(json::array({24.0, 3}));
            } else {
                for (const auto& s : flags) {
                    const auto [period, order] = parse_seasonality(s);
                    list.push_back(json::array({period, order}));
                }
            }
            return list;
        };

        if (synth->parsed()) {
            const json params{{"years", sy_years},
                              {"base", sy_base},
                              {"yearly_amp", sy_yearly},
                              {"daily_amp", sy_daily},
                              {"trend", sy_trend},
                              {"noise_sd", sy_noise},
                              {"dry_winter_factor", sy_winter},
                              {"anomaly_sd", sy_anomaly_sd},
                              {"anomaly_hours", sy_anomaly_hours},
                              {"start", sy_start},
                              {"seed", seed}};
            execute_synth(params, prepare_out_dir(out));
        } else if (fit->parsed()) {
            const json params{
                {"inflow", absolute_path(fit_inflow)},
                {"train_start",
                 fit_train_start.empty() ? json() : json(fit_train_start)},
                {"train_end",
                 fit_train_end.empty() ? json() : json(fit_train_end)},
                {"changepoints", fit_cp},
                {"cp_range_fraction", fit_cp_range},
                {"ridge", fit_ridge},
                {"seasonalities", seasonality_list(fit_seas)}};
            execute_fit(params, prepare_out_dir(out));
        } else if (forecast->parsed()) {
            const json params{
                {"model", absolute_path(fc_model)},
                {"origin", fc_origin.empty() ? json() : json(fc_origin)},
                {"horizon", fc_horizon},
                {"scenarios", fc_scenarios},
                {"epsilon", fc_epsilon},
                {"beta", fc_beta},
                {"noise", !fc_no_noise},
                {"future_changepoints", !fc_no_cp},
                {"seed", seed}};
            execute_forecast(params, prepare_out_dir(out));
        } else if (run->parsed()) {
            const json params{
                {"policy", run_policy},
                {"config", absolute_path(run_config)},
                {"inflow", absolute_path(run_inflow)},
                {"train_start",
                 run_train_start.empty() ? json() : json(run_train_start)},
                {"train_end",
                 run_train_end.empty() ? json() : json(run_train_end)},
                {"sim_start", run_sim_start},
                {"steps", run_steps},
                {"horizon", run_horizon},
                {"epsilon", run_epsilon},
                {"beta", run_beta},
                {"scenarios", run_scenarios},
                {"seed", seed},
                {"refit_period", run_refit},
                {"s0_level", run_s0->count() ? json(run_s0_level) : json()},
                {"objective", run_objective},
                {"lambda", run_lambda},
                {"c", run_c},
                {"dry_weight", run_dry_weight},
                {"noise", !run_no_noise},
                {"future_changepoints", !run_no_cp},
                {"changepoints", run_cp},
                {"cp_range_fraction", run_cp_range},
                {"ridge", run_ridge},
                {"seasonalities", seasonality_list(run_seas)}};
            execute_run(params, prepare_out_dir(out));
        } else if (mc->parsed()) {
            const json params{
                {"config", absolute_path(mc_config)},
                {"inflow", absolute_path(mc_inflow)},
                {"train_start",
                 mc_train_start.empty() ? json() : json(mc_train_start)},
                {"train_end",
                 mc_train_end.empty() ? json() : json(mc_train_end)},
                {"replicates", mc_replicates},
                {"steps", mc_steps},
                {"horizon", mc_horizon},
                {"epsilon", mc_epsilon},
                {"beta", mc_beta},
                {"scenarios", mc_scenarios},
                {"seed", seed},
                {"refit_period", mc_refit},
                {"dry_weight", mc_dry_weight},
                {"c", mc_c},
                {"s0_level", mc_s0->count() ? json(mc_s0_level) : json()},
                {"curves", !mc_no_curves},
                {"changepoints", mc_cp},
                {"cp_range_fraction", mc_cp_range},
                {"ridge", mc_ridge},
                {"seasonalities", seasonality_list(mc_seas)}};
            execute_montecarlo(params, prepare_out_dir(out));
        } else if (replay->parsed()) {
            execute_replay(replay_manifest, prepare_out_dir(out));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
