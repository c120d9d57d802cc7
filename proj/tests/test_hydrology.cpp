#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "resmpc/errors.hpp"
#include "resmpc/reservoir.hpp"
#include "resmpc/series.hpp"
#include "resmpc/timeutil.hpp"
#include "support.hpp"

using namespace resmpc;
using testsupport::TempDir;
using testsupport::write_file;

TEST_CASE("timestamps parse, format and stay hour-aligned") {
    const Timestamp t = parse_timestamp("2000-03-01T05:00:00Z");
    CHECK(format_timestamp(t) == "2000-03-01T05:00:00Z");
    CHECK(parse_timestamp("2000-03-01 05:00") == t);
    CHECK(parse_timestamp("2000-03-01T05:00:00") == t);
    CHECK_THROWS_AS(parse_timestamp("2000-03-01T05:30:00Z"), Error);
    CHECK_THROWS_AS(parse_timestamp("2000-13-01T05:00:00Z"), Error);
    CHECK_THROWS_AS(parse_timestamp("garbage"), Error);
}

TEST_CASE("day-of-year folds Feb 29 into day 59") {
    CHECK(day_of_year_365(make_timestamp(2023, 1, 1)) == 0);
    CHECK(day_of_year_365(make_timestamp(2023, 12, 31)) == 364);
    // 1-based day 59 is Feb 28; a leap day lands in the same slot.
    CHECK(day_of_year_365(make_timestamp(2024, 2, 28)) == 58);
    CHECK(day_of_year_365(make_timestamp(2024, 2, 29)) == 58);
    CHECK(day_of_year_365(make_timestamp(2024, 3, 1)) == 59);
    CHECK(day_of_year_365(make_timestamp(2023, 3, 1)) == 59);
    CHECK(hour_of_year(make_timestamp(2023, 1, 1, 7)) == 7);
    CHECK(hour_of_year(make_timestamp(2023, 12, 31, 23)) == 8759);
}

TEST_CASE("step_dynamics evaluates the hourly mass balance exactly") {
    const Timestamp t0 = make_timestamp(2000, 1, 1);
    CHECK(step_dynamics({t0, 1e8}, 100.0, 50.0).volume ==
          doctest::Approx(100180000.0).epsilon(1e-15));
    CHECK(step_dynamics({t0, 1e8}, 80.0, 80.0).volume == 1e8);
    CHECK(step_dynamics({t0, 1e8}, 0.0, 100.0).volume ==
          doctest::Approx(99640000.0).epsilon(1e-15));
    CHECK(step_dynamics({t0, 1e8}, 100.0, 50.0).time == t0 + 1);

    // A draining release is reported, never floored.
    CHECK(step_dynamics({t0, 1000.0}, 0.0, 10.0).volume < 0.0);

    CHECK_THROWS_AS(step_dynamics({t0, 1e8}, std::nan(""), 50.0), Error);
    CHECK_THROWS_AS(step_dynamics({t0, 1e8}, 100.0,
                                  std::numeric_limits<double>::infinity()),
                    Error);
    CHECK_THROWS_AS(step_dynamics({t0, 1e8}, -1.0, 50.0), Error);
}

TEST_CASE("step_dynamics is linear in (q, u)") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> flow(0.0, 400.0);
    const Timestamp t0 = make_timestamp(2000, 1, 1);
    for (int i = 0; i < 200; ++i) {
        const double s = 1e8 + flow(rng) * 1e5;
        const double q1 = flow(rng), q2 = flow(rng);
        const double u1 = flow(rng), u2 = flow(rng);
        const double lhs = step_dynamics({t0, s}, q1 + q2, u1 + u2).volume - s;
        const double rhs = (step_dynamics({t0, s}, q1, u1).volume - s) +
                           (step_dynamics({t0, s}, q2, u2).volume - s);
        // Differencing volumes near 1e8 leaves ~1e-8 of cancellation noise.
        CHECK(std::abs(lhs - rhs) <= 1e-6);
    }
}

TEST_CASE("mass conservation holds over random trajectories") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> flow(0.0, 300.0);
    const Timestamp t0 = make_timestamp(2000, 1, 1);
    ReservoirState state{t0, 2e8};
    double net = 0.0;
    for (int t = 0; t < 5000; ++t) {
        const double q = flow(rng), u = flow(rng);
        state = step_dynamics(state, q, u);
        net += q - u;
    }
    CHECK(std::abs(state.volume - 2e8 - 3600.0 * net) <= 1e-6 * 2e8);
}

TEST_CASE("volume/level conversion is the declared affine map") {
    ReservoirConfig cfg = testsupport::como_like_config();
    CHECK(volume_to_level(cfg.s_ref, cfg) == 0.0);

    ReservoirConfig plain = cfg;
    plain.s_ref = 0.0;
    CHECK(volume_to_level(1.45e6, plain) == doctest::Approx(0.01).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> vol(0.5e8, 4e8);
    double prev_level = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        const double s = 0.5e8 + double(i) * 3.5e6;
        const double h = volume_to_level(s, cfg);
        CHECK(h > prev_level);  // strictly increasing
        prev_level = h;
        const double back = level_to_volume(h, cfg);
        CHECK(std::abs(back - s) <= 1e-9 * s);
        const double v = vol(rng);
        CHECK(std::abs(level_to_volume(volume_to_level(v, cfg), cfg) - v) <=
              1e-9 * v);
    }
}

TEST_CASE("climatology averages by day of year") {
    // 2001 and 2002 are both non-leap, so two "years" of 8760 hours
    // line up exactly with the calendar.
    const Timestamp start = make_timestamp(2001, 1, 1);

    SUBCASE("constant series") {
        const auto clim =
            climatology(testsupport::constant_series(start, 2 * 8760, 42.0));
        REQUIRE(clim.size() == 365);
        for (double v : clim) CHECK(v == doctest::Approx(42.0).epsilon(1e-14));
    }
    SUBCASE("two distinct years average") {
        auto series = testsupport::constant_series(start, 8760, 10.0);
        const auto year_b = testsupport::constant_series(start + 8760, 8760, 30.0);
        series.values.insert(series.values.end(), year_b.values.begin(),
                             year_b.values.end());
        for (double v : climatology(series))
            CHECK(v == doctest::Approx(20.0).epsilon(1e-14));
    }
    SUBCASE("per-day samples {0, 100} average to 50") {
        auto series = testsupport::constant_series(start, 8760, 0.0);
        const auto year_b = testsupport::constant_series(start + 8760, 8760, 100.0);
        series.values.insert(series.values.end(), year_b.values.begin(),
                             year_b.values.end());
        for (double v : climatology(series))
            CHECK(v == doctest::Approx(50.0).epsilon(1e-14));
    }
    SUBCASE("a 365*24-periodic series reproduces its daily means exactly") {
        auto daily_value = [](int day) { return 20.0 + double(day % 17); };
        auto series = testsupport::series_from(
            start, 2 * 8760, [&](double t) {
                return daily_value(int(t / 24.0) % 365);
            });
        const auto clim = climatology(series);
        for (int d = 0; d < 365; ++d) CHECK(clim[std::size_t(d)] == daily_value(d));
    }
    SUBCASE("insufficient span is rejected") {
        CHECK_THROWS_AS(
            climatology(testsupport::constant_series(start, 8000, 1.0)), Error);
    }
    SUBCASE("leap year still fills all 365 slots") {
        const auto clim = climatology(testsupport::constant_series(
            make_timestamp(2024, 1, 1), 8784, 5.0));
        for (double v : clim) CHECK(v == 5.0);
    }
}

TEST_CASE("inflow CSV loader enforces the record contract") {
    TempDir dir("inflow_csv");

    SUBCASE("well-formed rows load") {
        const auto path = dir.file("ok.csv");
        write_file(path,
                   "timestamp,inflow_m3s\n"
                   "2000-01-01T00:00:00Z,1.5\n"
                   "2000-01-01T01:00:00Z,2.5\n"
                   "2000-01-01T02:00:00Z,3.5\n");
        const auto series = load_inflow_csv(path);
        REQUIRE(series.size() == 3);
        CHECK(series.values[1] == 2.5);
        CHECK(series.start == make_timestamp(2000, 1, 1));
    }
    SUBCASE("a missing hour is a gap error naming the range") {
        const auto path = dir.file("gap.csv");
        write_file(path,
                   "timestamp,inflow_m3s\n"
                   "2000-01-01T00:00:00Z,1\n"
                   "2000-01-01T02:00:00Z,1\n");
        try {
            load_inflow_csv(path);
            FAIL("expected gap error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Validation);
            CHECK(std::string(e.what()).find("2000-01-01T01:00:00Z") !=
                  std::string::npos);
        }
    }
    SUBCASE("negative inflow is a validation error") {
        const auto path = dir.file("neg.csv");
        write_file(path,
                   "timestamp,inflow_m3s\n"
                   "2000-01-01T00:00:00Z,-5.0\n");
        CHECK_THROWS_AS(load_inflow_csv(path), Error);
    }
    SUBCASE("malformed rows carry the line number") {
        const auto path = dir.file("bad.csv");
        write_file(path,
                   "timestamp,inflow_m3s\n"
                   "2000-01-01T00:00:00Z,1\n"
                   "2000-01-01T01:00:00Z,not_a_number\n");
        try {
            load_inflow_csv(path);
            FAIL("expected parse error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("duplicate timestamps are rejected") {
        const auto path = dir.file("dup.csv");
        write_file(path,
                   "timestamp,inflow_m3s\n"
                   "2000-01-01T00:00:00Z,1\n"
                   "2000-01-01T00:00:00Z,1\n");
        CHECK_THROWS_AS(load_inflow_csv(path), Error);
    }
    SUBCASE("save/load round-trips") {
        auto series = testsupport::series_from(make_timestamp(2001, 5, 1), 50,
                                               [](double t) { return t * 1.25; });
        const auto path = dir.file("roundtrip.csv");
        save_inflow_csv(series, path);
        const auto loaded = load_inflow_csv(path);
        REQUIRE(loaded.size() == series.size());
        CHECK(loaded.start == series.start);
        for (std::size_t i = 0; i < series.size(); ++i)
            CHECK(loaded.values[i] == series.values[i]);
    }
}

TEST_CASE("demand profiles look up periodically and validate bounds") {
    DemandProfile profile;
    profile.values = {1.0, 2.0, 3.0};
    CHECK(profile.at_hour_of_year(0) == 1.0);
    CHECK(profile.at_hour_of_year(4) == 2.0);  // wraps mod 3

    ReservoirConfig cfg = testsupport::como_like_config();
    cfg.demand.values = {cfg.u_max + 1.0};
    CHECK_THROWS_AS(cfg.validate(), Error);

    TempDir dir("demand_csv");
    SUBCASE("daily file expands to hours") {
        std::string body = "day_of_year,demand_m3s\n";
        for (int d = 1; d <= 365; ++d)
            body += std::to_string(d) + "," + std::to_string(d % 7) + "\n";
        const auto path = dir.file("daily.csv");
        write_file(path, body);
        const auto loaded = load_demand_csv(path);
        REQUIRE(loaded.values.size() == 8760);
        CHECK(loaded.values[0] == 1.0);       // day 1, hour 0
        CHECK(loaded.values[24 * 6] == 0.0);  // day 7
    }
    SUBCASE("missing hours are rejected") {
        const auto path = dir.file("short.csv");
        write_file(path, "hour_of_year,demand_m3s\n0,1\n1,1\n");
        CHECK_THROWS_AS(load_demand_csv(path), Error);
    }
}

TEST_CASE("reservoir config file round-trips and reports missing keys") {
    TempDir dir("config");
    const ReservoirConfig cfg = testsupport::como_like_config(120.0);
    save_demand_csv(cfg.demand, dir.file("demand.csv"));
    save_reservoir_config(cfg, dir.file("reservoir.cfg"), "demand.csv");

    const ReservoirConfig loaded = load_reservoir_config(dir.file("reservoir.cfg"));
    CHECK(loaded.s_min == cfg.s_min);
    CHECK(loaded.s_max == cfg.s_max);
    CHECK(loaded.u_max == cfg.u_max);
    CHECK(loaded.surface_area == cfg.surface_area);
    CHECK(loaded.h_dry == cfg.h_dry);
    CHECK(loaded.demand.at_hour_of_year(123) == 120.0);

    write_file(dir.file("missing.cfg"),
               "s_min = 1\ns_max = 2\nu_min = 0\nu_max = 10\n"
               "demand_path = demand.csv\n");
    try {
        load_reservoir_config(dir.file("missing.cfg"));
        FAIL("expected missing-key error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Usage);
        CHECK(std::string(e.what()).find("surface_area") != std::string::npos);
    }
}
