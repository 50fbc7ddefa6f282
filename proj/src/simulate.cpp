#include "terracost/synth/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "terracost/core/errors.hpp"
#include "terracost/core/rng.hpp"
#include "terracost/synth/oracle.hpp"

namespace terracost {

TrajectoryLog simulate_run(const Environment& env, const OracleConfig& cfg, const Path& waypoints) {
    cfg.validate();
    if (waypoints.points.size() < 2) throw DegeneratePathError("waypoint list needs >= 2 points");

    const auto& pts = waypoints.points;
    const double total = waypoints.arc_length();
    const double dt = 1.0 / cfg.sample_rate;

    std::size_t edge = 0;
    double edge_start_arc = 0.0;
    double edge_len = std::hypot(pts[1].x - pts[0].x, pts[1].y - pts[0].y);
    const auto locate = [&](double arc) {
        while (edge + 2 < pts.size() && arc > edge_start_arc + edge_len + 1e-12) {
            edge_start_arc += edge_len;
            ++edge;
            edge_len = std::hypot(pts[edge + 1].x - pts[edge].x, pts[edge + 1].y - pts[edge].y);
        }
        double t = (arc - edge_start_arc) / edge_len;
        t = std::max(0.0, std::min(1.0, t));
        Point p{pts[edge].x + (pts[edge + 1].x - pts[edge].x) * t,
                pts[edge].y + (pts[edge + 1].y - pts[edge].y) * t};
        return std::pair<Point, double>{p, heading_of(pts[edge], pts[edge + 1])};
    };

    SplitMix64 noise(derive_seed(cfg.seed, 0x6C'6F'67ULL));
    TrajectoryLog log;
    log.reserve(static_cast<std::size_t>(total / (cfg.v_min * dt)) + 2);

    double arc = 0.0;
    double t = 0.0;
    while (true) {
        const auto [p, heading] = locate(arc);
        const auto grid = world_to_grid(env.geo(), p.x, p.y);
        const int label = static_cast<int>(sample_nearest(env.class_map, grid.row, grid.col));
        if (!env.is_traversable(label)) {
            throw NonTraversableError("robot at (" + std::to_string(p.x) + ", " +
                                      std::to_string(p.y) + ") on class " + std::to_string(label));
        }
        const double slope = directional_slope(env, p.x, p.y, heading);
        const double v = oracle_velocity(cfg, slope, label);
        const double w = oracle_power(cfg, slope, label, v);

        LogRecord rec;
        rec.t = t;
        rec.x = p.x;
        rec.y = p.y;
        rec.voltage = cfg.battery_voltage;
        rec.current = w / cfg.battery_voltage + cfg.current_noise * noise.gaussian();
        rec.speed = v;
        log.push_back(rec);

        if (arc >= total - 1e-9) break;
        arc = std::min(arc + v * dt, total);
        t += dt;
    }
    return log;
}

TrajectoryLog load_log_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open log csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty log csv: " + path);

    TrajectoryLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        LogRecord r;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
        if (!(ss >> r.t >> c1 >> r.x >> c2 >> r.y >> c3 >> r.voltage >> c4 >> r.current >> c5 >>
              r.speed) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',') {
            throw FormatError("bad log csv line: " + line);
        }
        log.push_back(r);
    }
    return log;
}

void save_log_csv(const TrajectoryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write log csv: " + path);
    out << "t,x,y,voltage,current,speed\n";
    char buf[160];
    for (const LogRecord& r : log) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", r.t, r.x, r.y,
                      r.voltage, r.current, r.speed);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace terracost
