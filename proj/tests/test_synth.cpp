#include "doctest.h"

#include <cmath>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "terracost/core/errors.hpp"
#include "terracost/synth/generate.hpp"
#include "terracost/synth/oracle.hpp"
#include "terracost/synth/simulate.hpp"
#include "terracost/synth/tours.hpp"

using namespace terracost;

namespace {
double deg2rad(double d) { return d * M_PI / 180.0; }
}  // namespace

TEST_SUITE("synth") {

TEST_CASE("steady-state velocity on a 22.5 degree grade") {
    const OracleConfig cfg = OracleConfig::defaults();
    // v_max * kappa * (1 - 0.8 * tan(22.5 deg)) on a full-speed surface
    CHECK(oracle_velocity(cfg, deg2rad(22.5), 7) ==
          doctest::Approx(0.668629150101524).epsilon(1e-12));
}

TEST_CASE("electrical power on flat paved ground at 1 m/s") {
    const OracleConfig cfg = OracleConfig::defaults();
    // idle + m g v mu = 30 + 50 * 9.81 * 1 * 0.05
    CHECK(oracle_power(cfg, 0.0, 7, 1.0) == doctest::Approx(54.525).epsilon(1e-12));
}

TEST_CASE("velocity is non-increasing in slope magnitude and clamped") {
    const OracleConfig cfg = OracleConfig::defaults();
    for (int label : {4, 5, 6, 7}) {
        double prev_up = oracle_velocity(cfg, 0.0, label);
        double prev_down = prev_up;
        CHECK(prev_up == doctest::Approx(cfg.v_max * cfg.params_for(label).speed_factor));
        for (int deg = 1; deg <= 22; ++deg) {
            const double up = oracle_velocity(cfg, deg2rad(deg), label);
            const double down = oracle_velocity(cfg, deg2rad(-deg), label);
            CHECK(up <= prev_up + 1e-12);
            CHECK(down <= prev_down + 1e-12);
            prev_up = up;
            prev_down = down;
        }
    }
    CHECK(oracle_velocity(cfg, deg2rad(60.0), 7) == cfg.v_min);
    CHECK(oracle_velocity(cfg, deg2rad(-80.0), 7) == cfg.v_min);
}

TEST_CASE("power never drops below idle and grows with speed") {
    const OracleConfig cfg = OracleConfig::defaults();
    CHECK(oracle_power(cfg, deg2rad(-30.0), 7, 1.0) == cfg.idle_power);
    CHECK(oracle_power(cfg, 0.0, 4, 0.0) == cfg.idle_power);
    double prev = 0.0;
    for (double v = 0.1; v <= 1.0; v += 0.1) {
        const double w = oracle_power(cfg, deg2rad(5.0), 5, v);
        CHECK(w > prev);
        prev = w;
    }
    CHECK_THROWS_AS(oracle_power(cfg, 0.0, 7, -0.1), InvalidArgError);
    CHECK_THROWS_AS(oracle_power(cfg, 0.0, 3, 1.0), NonTraversableError);
}

TEST_CASE("directional slope of a planar height field") {
    const Environment env = tctest::ramp_env(60, 0.5, 0.2, 0.1);
    // heights live in f32, so the central difference carries ~1e-4 noise
    const double x = 15.0, y = 15.0;
    CHECK(directional_slope(env, x, y, 0.0) == doctest::Approx(std::atan(0.2)).epsilon(2e-3));
    CHECK(directional_slope(env, x, y, 90.0) == doctest::Approx(std::atan(0.1)).epsilon(2e-3));
    CHECK(directional_slope(env, x, y, 180.0) == doctest::Approx(std::atan(-0.2)).epsilon(2e-3));
    const double diag = (0.2 + 0.1) / std::sqrt(2.0);
    CHECK(directional_slope(env, x, y, 45.0) == doctest::Approx(std::atan(diag)).epsilon(2e-3));
}

TEST_CASE("generated environments are seeded and shaped as requested") {
    GenerateParams p;
    p.width_m = 10.0;
    p.height_m = 8.0;
    p.resolution = 0.05;
    p.seed = 11;
    const OracleConfig oracle = OracleConfig::defaults();
    const Environment a = generate_environment(p, oracle);

    CHECK(a.width() == 200);
    CHECK(a.height_cells() == 160);
    CHECK(a.num_classes == 7);
    CHECK(a.traversable == std::set<int>{4, 5, 6, 7});

    SUBCASE("same seed reproduces every raster bit for bit") {
        const Environment b = generate_environment(p, oracle);
        CHECK((a.ortho.data == b.ortho.data).all());
        CHECK((a.height.data == b.height.data).all());
        CHECK((a.class_map.data == b.class_map.data).all());
    }
    SUBCASE("different seed changes the terrain") {
        GenerateParams q = p;
        q.seed = 12;
        const Environment b = generate_environment(q, oracle);
        CHECK_FALSE((a.height.data == b.height.data).all());
    }
    SUBCASE("border frame is no-data, interior is traversable labels only") {
        const int border_cells = static_cast<int>(p.border_m / p.resolution);
        CHECK(a.class_map.at(0, 0) == 0.0f);
        CHECK(a.class_map.at(a.height_cells() - 1, a.width() - 1) == 0.0f);
        std::set<int> seen;
        for (int i = 0; i < a.height_cells(); ++i) {
            for (int j = 0; j < a.width(); ++j) {
                seen.insert(static_cast<int>(a.class_map.at(i, j)));
            }
        }
        CHECK(seen == std::set<int>{0, 4, 5, 6, 7});
        for (int i = border_cells + 1; i < a.height_cells() - border_cells - 1; ++i) {
            for (int j = border_cells + 1; j < a.width() - border_cells - 1; ++j) {
                CHECK(a.class_map.at(i, j) != 0.0f);
            }
        }
    }
    SUBCASE("steepest central-difference gradient matches the slope cap") {
        double max_grad = 0.0;
        for (int i = 1; i < a.height_cells() - 1; ++i) {
            for (int j = 1; j < a.width() - 1; ++j) {
                const double gx = (a.height.at(i, j + 1) - a.height.at(i, j - 1)) /
                                  (2.0 * p.resolution);
                const double gy = (a.height.at(i - 1, j) - a.height.at(i + 1, j)) /
                                  (2.0 * p.resolution);
                max_grad = std::max(max_grad, std::hypot(gx, gy));
            }
        }
        CHECK(max_grad == doctest::Approx(std::tan(deg2rad(p.max_slope_deg))).epsilon(0.01));
    }
    SUBCASE("zero roughness yields a flat datum plane") {
        GenerateParams q = p;
        q.roughness = 0.0;
        const Environment b = generate_environment(q, oracle);
        CHECK((b.height.data == 600.0f).all());
    }
}

TEST_CASE("simulated run on flat paved ground") {
    const Environment env = tctest::flat_env(160, 0.1, 7);
    OracleConfig cfg = OracleConfig::defaults();
    cfg.current_noise = 0.0;
    const Path line({{2.0, 2.0}, {12.0, 2.0}});
    const TrajectoryLog log = simulate_run(env, cfg, line);

    // 10 m at exactly 1 m/s sampled at 20 Hz: t = 0..10 inclusive
    REQUIRE(log.size() == 201);
    CHECK(log.front().t == 0.0);
    CHECK(log.back().t == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(log.back().x == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(log.back().y == doctest::Approx(2.0).epsilon(1e-12));
    for (const LogRecord& rec : log) {
        CHECK(rec.speed == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rec.voltage == 24.0);
        CHECK(rec.voltage * rec.current == doctest::Approx(54.525).epsilon(1e-9));
    }

    SUBCASE("current noise is seeded") {
        OracleConfig noisy = OracleConfig::defaults();
        noisy.seed = 5;
        const TrajectoryLog l1 = simulate_run(env, noisy, line);
        const TrajectoryLog l2 = simulate_run(env, noisy, line);
        REQUIRE(l1.size() == l2.size());
        for (std::size_t i = 0; i < l1.size(); ++i) CHECK(l1[i].current == l2[i].current);
        noisy.seed = 6;
        const TrajectoryLog l3 = simulate_run(env, noisy, line);
        bool differs = false;
        for (std::size_t i = 0; i < l1.size() && !differs; ++i) {
            differs = l1[i].current != l3[i].current;
        }
        CHECK(differs);
    }
}

TEST_CASE("simulation refuses to drive onto non-traversable ground") {
    Environment env = tctest::flat_env(100, 0.1, 6);
    for (int i = 0; i < 100; ++i) {
        for (int j = 48; j < 52; ++j) env.class_map.data(i, j) = 0.0f;
    }
    const OracleConfig cfg = OracleConfig::defaults();
    CHECK_THROWS_AS(simulate_run(env, cfg, Path({{1.0, 5.0}, {9.0, 5.0}})), NonTraversableError);
    CHECK_NOTHROW(simulate_run(env, cfg, Path({{1.0, 5.0}, {4.0, 5.0}})));
}

TEST_CASE("trajectory log csv round trip") {
    tctest::TempDir tmp;
    const Environment env = tctest::flat_env(160, 0.1, 5);
    OracleConfig cfg = OracleConfig::defaults();
    cfg.seed = 17;
    const TrajectoryLog log = simulate_run(env, cfg, Path({{2.0, 3.0}, {11.0, 9.0}}));
    const std::string path = tmp.file("log.csv");
    save_log_csv(log, path);
    const TrajectoryLog back = load_log_csv(path);

    REQUIRE(back.size() == log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(back[i].t == doctest::Approx(log[i].t).epsilon(1e-5));
        CHECK(back[i].x == doctest::Approx(log[i].x).epsilon(1e-5));
        CHECK(back[i].y == doctest::Approx(log[i].y).epsilon(1e-5));
        CHECK(back[i].voltage == doctest::Approx(log[i].voltage).epsilon(1e-5));
        CHECK(back[i].current == doctest::Approx(log[i].current).epsilon(1e-5));
        CHECK(back[i].speed == doctest::Approx(log[i].speed).epsilon(1e-5));
    }

    SUBCASE("malformed row is rejected") {
        std::ofstream(path) << "t,x,y,voltage,current,speed\n0,0,0,24\n";
        CHECK_THROWS_AS(load_log_csv(path), FormatError);
    }
}

TEST_CASE("coverage tours stay on traversable ground and vary heading") {
    GenerateParams p;
    p.width_m = 20.0;
    p.height_m = 20.0;
    p.seed = 3;
    const Environment env = generate_environment(p, OracleConfig::defaults());
    TourParams tp;
    tp.seed = 3;
    const std::vector<Path> tours = make_coverage_tours(env, tp);
    REQUIRE_FALSE(tours.empty());

    std::set<int> heading_families;
    for (const Path& tour : tours) {
        for (std::size_t k = 1; k < tour.points.size(); ++k) {
            const Point a = tour.points[k - 1];
            const Point b = tour.points[k];
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            const int steps = std::max(2, static_cast<int>(len / 0.1));
            for (int q = 0; q <= steps; ++q) {
                const double f = static_cast<double>(q) / steps;
                const auto g = world_to_grid(env.geo(), a.x + f * (b.x - a.x),
                                             a.y + f * (b.y - a.y));
                const int label = static_cast<int>(sample_nearest(env.class_map, g.row, g.col));
                CHECK(env.is_traversable(label));
            }
            if (len > 0.4) {
                heading_families.insert(
                    static_cast<int>(std::lround(heading_of(a, b))) % 180);
            }
        }
    }
    CHECK(heading_families.count(0) == 1);
    CHECK(heading_families.count(90) == 1);
    CHECK(heading_families.count(45) == 1);
    CHECK(heading_families.count(135) == 1);

    SUBCASE("diagonals can be disabled") {
        TourParams flat_tp = tp;
        flat_tp.diagonals = false;
        std::set<int> families;
        for (const Path& tour : make_coverage_tours(env, flat_tp)) {
            for (std::size_t k = 1; k < tour.points.size(); ++k) {
                const double len = std::hypot(tour.points[k].x - tour.points[k - 1].x,
                                              tour.points[k].y - tour.points[k - 1].y);
                if (len > 0.4) {
                    families.insert(static_cast<int>(std::lround(
                                        heading_of(tour.points[k - 1], tour.points[k]))) %
                                    180);
                }
            }
        }
        CHECK(families.count(45) == 0);
        CHECK(families.count(135) == 0);
    }
}

TEST_CASE("oracle config file round trip and defaults") {
    tctest::TempDir tmp;
    OracleConfig cfg = OracleConfig::defaults();
    cfg.mass = 62.5;
    cfg.terrain[1].rolling_resistance = 0.3;
    const std::string path = tmp.file("oracle.cfg");
    save_oracle_config(cfg, path);
    const OracleConfig back = load_oracle_config(path);

    CHECK(back.mass == cfg.mass);
    CHECK(back.v_max == cfg.v_max);
    CHECK(back.sample_rate == cfg.sample_rate);
    REQUIRE(back.terrain.size() == cfg.terrain.size());
    for (std::size_t i = 0; i < cfg.terrain.size(); ++i) {
        CHECK(back.terrain[i].class_label == cfg.terrain[i].class_label);
        CHECK(back.terrain[i].rolling_resistance == cfg.terrain[i].rolling_resistance);
        CHECK(back.terrain[i].speed_factor == cfg.terrain[i].speed_factor);
    }

    SUBCASE("file without terrain rows falls back to default terrain") {
        const std::string mini = tmp.file("mini.cfg");
        std::ofstream(mini) << "mass = 70\n";
        const OracleConfig m = load_oracle_config(mini);
        CHECK(m.mass == 70.0);
        CHECK(m.terrain.size() == 4);
        CHECK(m.params_for(7).rolling_resistance == 0.05);
    }
    SUBCASE("unknown class throws") {
        CHECK_THROWS_AS(cfg.params_for(2), NonTraversableError);
    }
}

}  // TEST_SUITE
