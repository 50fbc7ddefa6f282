#pragma once

#include "terracost/env/environment.hpp"
#include "terracost/synth/terrain.hpp"

namespace terracost {

/// Steady-state velocity on a given slope and terrain:
///   v = clamp(v_max * kappa_c * (1 - a+ * max(tan g, 0) - a- * max(-tan g, 0)),
///             v_min, v_max)
/// slope_rad is the directional slope along the heading, uphill positive.
double oracle_velocity(const OracleConfig& cfg, double slope_rad, int class_label);

/// Electrical power at velocity v on a slope/terrain, floored at idle power
/// (no regeneration):
///   w = max(idle, idle + m * g * v * (mu_c * cos g + sin g))
double oracle_power(const OracleConfig& cfg, double slope_rad, int class_label, double v);

/// Directional slope of the height layer at world (x, y) along heading
/// (degrees, 0 = East, CCW): central difference over one cell. Radians,
/// uphill positive.
double directional_slope(const Environment& env, double x, double y, double heading_deg);

}  // namespace terracost
