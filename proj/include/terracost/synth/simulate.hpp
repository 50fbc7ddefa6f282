#pragma once

#include <string>
#include <vector>

#include "terracost/env/environment.hpp"
#include "terracost/path/path.hpp"
#include "terracost/synth/terrain.hpp"

namespace terracost {

struct LogRecord {
    double t = 0.0;        // s, constant step 1/sample_rate
    double x = 0.0;        // m
    double y = 0.0;
    double voltage = 0.0;  // V
    double current = 0.0;  // A
    double speed = 0.0;    // m/s
};

using TrajectoryLog = std::vector<LogRecord>;

/// Integrates motion along the waypoint polyline at the oracle velocity of
/// the local slope/class, emitting one record per sample period. Current is
/// oracle_power / battery_voltage plus seeded Gaussian noise; voltage is
/// held constant.
TrajectoryLog simulate_run(const Environment& env, const OracleConfig& cfg, const Path& waypoints);

/// CSV `t,x,y,voltage,current,speed`, 6 significant digits, LF endings.
TrajectoryLog load_log_csv(const std::string& path);
void save_log_csv(const TrajectoryLog& log, const std::string& path);

}  // namespace terracost
