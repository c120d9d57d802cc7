#include "resmpc/additive_model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "resmpc/errors.hpp"

namespace resmpc {

double AdditiveModel::trend(double t_hours) const {
    double rate = k0;
    double offset = m0;
    for (std::size_t j = 0; j < changepoints.size(); ++j) {
        if (changepoints[j] > t_hours) break;
        rate += delta[j];
        offset += gamma[j];
    }
    return rate * t_hours + offset;
}

double AdditiveModel::seasonal(double t_hours) const {
    double s = 0.0;
    for (const auto& block : seasonality) {
        const double base = 2.0 * std::numbers::pi * t_hours / block.period_hours;
        for (int n = 1; n <= block.order; ++n) {
            s += block.cos_coef[std::size_t(n - 1)] * std::cos(base * n) +
                 block.sin_coef[std::size_t(n - 1)] * std::sin(base * n);
        }
    }
    return s;
}

void AdditiveModel::validate() const {
    const std::size_t m = changepoints.size();
    if (delta.size() != m || gamma.size() != m)
        fail(ErrorKind::Validation, "changepoint arrays disagree in length");
    for (std::size_t j = 0; j + 1 < m; ++j)
        if (!(changepoints[j] < changepoints[j + 1]))
            fail(ErrorKind::Validation, "changepoints must be increasing");
    if (m > 0 && (changepoints.front() <= 0.0 ||
                  changepoints.back() >= double(train_hours)))
        fail(ErrorKind::Validation, "changepoints outside the training window");
    for (const auto& block : seasonality) {
        if (!(block.period_hours > 0.0) || block.order < 1)
            fail(ErrorKind::Validation, "invalid seasonality block");
        if (int(block.cos_coef.size()) != block.order ||
            int(block.sin_coef.size()) != block.order)
            fail(ErrorKind::Validation, "seasonality coefficient count mismatch");
    }
    if (!(sigma_obs >= 0.0) || !(cp_scale >= 0.0))
        fail(ErrorKind::Validation, "negative noise scale");
}

namespace {

std::vector<double> changepoint_grid(std::int64_t train_hours,
                                     const FitConfig& cfg) {
    std::vector<double> grid;
    grid.reserve(std::size_t(cfg.changepoints));
    const double span = cfg.changepoint_range_fraction * double(train_hours);
    for (int j = 1; j <= cfg.changepoints; ++j)
        grid.push_back(span * double(j) / double(cfg.changepoints + 1));
    return grid;
}

}  // namespace

AdditiveModel fit_additive_model(const InflowSeries& history,
                                 const FitConfig& cfg) {
    history.validate();
    if (cfg.changepoints < 0)
        fail(ErrorKind::InvalidInput, "negative changepoint count");
    if (!(cfg.changepoint_range_fraction > 0.0 &&
          cfg.changepoint_range_fraction <= 1.0))
        fail(ErrorKind::InvalidInput, "changepoint_range_fraction outside (0,1]");
    if (cfg.ridge_strength < 0.0)
        fail(ErrorKind::InvalidInput, "negative ridge_strength");

    const std::int64_t n = std::int64_t(history.size());
    int harmonics = 0;
    for (const auto& [period, order] : cfg.seasonalities) {
        if (!(period > 0.0) || order < 1)
            fail(ErrorKind::InvalidInput, "invalid seasonality (period, order)");
        harmonics += 2 * order;
    }
    const int m = cfg.changepoints;
    const int p = 2 + m + harmonics;
    if (n <= 2 * std::int64_t(m + harmonics))
        fail(ErrorKind::InsufficientData,
             "history too short: " + std::to_string(n) + " samples for " +
                 std::to_string(m + harmonics) + " fitted effects");

    const auto grid = changepoint_grid(n, cfg);

    // Dense design: [t, 1, relu(t - t_j)..., cos/sin harmonics...].
    // With gamma tied to delta, a changepoint contributes
    // delta_j * (t - t_j)_+, so the whole model is linear in parameters.
    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd y(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = double(i);
        design(i, 0) = t;
        design(i, 1) = 1.0;
        for (int j = 0; j < m; ++j)
            design(i, 2 + j) = t > grid[std::size_t(j)] ? t - grid[std::size_t(j)] : 0.0;
        int col = 2 + m;
        for (const auto& [period, order] : cfg.seasonalities) {
            const double base = 2.0 * std::numbers::pi * t / period;
            for (int k = 1; k <= order; ++k) {
                design(i, col++) = std::cos(base * k);
                design(i, col++) = std::sin(base * k);
            }
        }
        y(i) = history.values[std::size_t(i)];
    }

    // Column equilibration keeps the normal equations well conditioned
    // (t spans 0..n while harmonics are O(1)).
    Eigen::VectorXd col_scale(p);
    for (int c = 0; c < p; ++c) {
        const double norm = design.col(c).norm();
        col_scale(c) = norm > 0.0 ? norm : 1.0;
        design.col(c) /= col_scale(c);
    }

    Eigen::MatrixXd gram = design.transpose() * design;
    for (int j = 0; j < m; ++j) {
        // Ridge applies to the physical delta, hence the 1/scale^2.
        const double s = col_scale(2 + j);
        gram(2 + j, 2 + j) += cfg.ridge_strength / (s * s);
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    bool deficient = ldlt.info() != Eigen::Success;
    if (!deficient) {
        const auto d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        if (!(dmax > 0.0) || d.minCoeff() < dmax * 1e-12) deficient = true;
    }
    if (deficient)
        fail(ErrorKind::Fit,
             "rank-deficient design; try fewer changepoints or harmonics");

    const Eigen::VectorXd theta_scaled = ldlt.solve(design.transpose() * y);
    const Eigen::VectorXd residual = y - design * theta_scaled;
    const Eigen::VectorXd theta = theta_scaled.cwiseQuotient(col_scale);

    AdditiveModel model;
    model.train_start = history.start;
    model.train_hours = n;
    model.k0 = theta(0);
    model.m0 = theta(1);
    model.changepoints = grid;
    model.delta.resize(std::size_t(m));
    model.gamma.resize(std::size_t(m));
    for (int j = 0; j < m; ++j) {
        model.delta[std::size_t(j)] = theta(2 + j);
        model.gamma[std::size_t(j)] = -grid[std::size_t(j)] * theta(2 + j);
    }
    int col = 2 + m;
    for (const auto& [period, order] : cfg.seasonalities) {
        SeasonalityBlock block;
        block.period_hours = period;
        block.order = order;
        for (int k = 1; k <= order; ++k) {
            block.cos_coef.push_back(theta(col++));
            block.sin_coef.push_back(theta(col++));
        }
        model.seasonality.push_back(std::move(block));
    }

    model.sigma_obs = std::sqrt(residual.squaredNorm() / double(n));
    double abs_delta = 0.0;
    for (double d : model.delta) abs_delta += std::abs(d);
    model.cp_scale = m > 0 ? abs_delta / double(m) : 0.0;

    model.validate();
    return model;
}

namespace {

void emit_array(std::ofstream& out, const char* key,
                const std::vector<double>& values) {
    out << key << " =";
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ' ' << buf;
    }
    out << '\n';
}

std::vector<double> parse_array(const std::string& text) {
    std::istringstream in(text);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    return out;
}

}  // namespace

void save_model(const AdditiveModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write model file '" + path + "'");
    char buf[64];
    auto emit = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << key << " = " << buf << '\n';
    };
    out << "resmpc_additive_model v1\n";
    out << "train_start = " << format_timestamp(model.train_start) << '\n';
    out << "train_hours = " << model.train_hours << '\n';
    emit("k0", model.k0);
    emit("m0", model.m0);
    emit("sigma_obs", model.sigma_obs);
    emit("cp_scale", model.cp_scale);
    emit_array(out, "changepoints", model.changepoints);
    emit_array(out, "delta", model.delta);
    emit_array(out, "gamma", model.gamma);
    for (const auto& block : model.seasonality) {
        std::snprintf(buf, sizeof buf, "%.17g", block.period_hours);
        out << "seasonality = " << buf << ' ' << block.order;
        for (double v : block.cos_coef) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ' ' << buf;
        }
        for (double v : block.sin_coef) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ' ' << buf;
        }
        out << '\n';
    }
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

AdditiveModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open model file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "resmpc_additive_model v1")
        fail(ErrorKind::Parse, "'" + path + "' is not a resmpc model file");

    AdditiveModel model;
    bool have_start = false, have_hours = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Parse, "bad model line '" + line + "'");
        std::string key = line.substr(0, eq);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        std::string value = line.substr(eq + 1);
        if (!value.empty() && value.front() == ' ') value.erase(0, 1);

        if (key == "train_start") {
            model.train_start = parse_timestamp(value);
            have_start = true;
        } else if (key == "train_hours") {
            model.train_hours = std::stoll(value);
            have_hours = true;
        } else if (key == "k0") {
            model.k0 = std::stod(value);
        } else if (key == "m0") {
            model.m0 = std::stod(value);
        } else if (key == "sigma_obs") {
            model.sigma_obs = std::stod(value);
        } else if (key == "cp_scale") {
            model.cp_scale = std::stod(value);
        } else if (key == "changepoints") {
            model.changepoints = parse_array(value);
        } else if (key == "delta") {
            model.delta = parse_array(value);
        } else if (key == "gamma") {
            model.gamma = parse_array(value);
        } else if (key == "seasonality") {
            const auto nums = parse_array(value);
            if (nums.size() < 2)
                fail(ErrorKind::Parse, "bad seasonality line in '" + path + "'");
            SeasonalityBlock block;
            block.period_hours = nums[0];
            block.order = int(nums[1]);
            if (nums.size() != 2 + 2 * std::size_t(block.order))
                fail(ErrorKind::Parse, "bad seasonality line in '" + path + "'");
            block.cos_coef.assign(nums.begin() + 2,
                                  nums.begin() + 2 + block.order);
            block.sin_coef.assign(nums.begin() + 2 + block.order, nums.end());
            model.seasonality.push_back(std::move(block));
        } else {
            fail(ErrorKind::Parse, "unknown model key '" + key + "'");
        }
    }
    if (!have_start || !have_hours)
        fail(ErrorKind::Parse, "model file '" + path + "' is incomplete");
    model.validate();
    return model;
}

}  // namespace resmpc
