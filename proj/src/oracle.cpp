#include "terracost/synth/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "terracost/core/errors.hpp"

namespace terracost {

double oracle_velocity(const OracleConfig& cfg, double slope_rad, int class_label) {
    const TerrainParams& t = cfg.params_for(class_label);
    const double g = std::tan(slope_rad);
    const double v = cfg.v_max * t.speed_factor *
                     (1.0 - cfg.uphill_gain * std::max(g, 0.0) -
                      cfg.downhill_gain * std::max(-g, 0.0));
    return std::clamp(v, cfg.v_min, cfg.v_max);
}

double oracle_power(const OracleConfig& cfg, double slope_rad, int class_label, double v) {
    if (!(v >= 0.0)) throw InvalidArgError("velocity must be non-negative");
    const TerrainParams& t = cfg.params_for(class_label);
    const double mech = cfg.mass * cfg.gravity * v *
                        (t.rolling_resistance * std::cos(slope_rad) + std::sin(slope_rad));
    return std::max(cfg.idle_power, cfg.idle_power + mech);
}

double directional_slope(const Environment& env, double x, double y, double heading_deg) {
    const double r = env.geo().resolution;
    const double th = heading_deg * M_PI / 180.0;
    const double ux = std::cos(th);
    const double uy = std::sin(th);

    const auto ahead = world_to_grid(env.geo(), x + r * ux, y + r * uy);
    const auto behind = world_to_grid(env.geo(), x - r * ux, y - r * uy);
    const double h_ahead = sample_bilinear(env.height, ahead.row, ahead.col);
    const double h_behind = sample_bilinear(env.height, behind.row, behind.col);
    return std::atan2(h_ahead - h_behind, 2.0 * r);
}

}  // namespace terracost
