#pragma once

#include <cstdint>

#include "terracost/env/environment.hpp"
#include "terracost/synth/terrain.hpp"

namespace terracost {

struct GenerateParams {
    double width_m = 30.0;
    double height_m = 30.0;
    double resolution = 0.05;   // meters per cell
    int num_classes = 7;
    double roughness = 0.6;     // 0 = flat
    double max_slope_deg = 22.5;
    double border_m = 1.0;      // no-data frame width
    int num_regions = 0;        // 0 = derive from area
    std::uint64_t seed = 0;
};

/// Deterministic synthetic environment: midpoint-displacement height field
/// rescaled so the steepest central-difference gradient equals
/// max_slope_deg, Voronoi regions over the traversable labels for the class
/// map (class 0 border frame), and a per-class shaded orthophoto.
Environment generate_environment(const GenerateParams& params, const OracleConfig& oracle);

}  // namespace terracost
