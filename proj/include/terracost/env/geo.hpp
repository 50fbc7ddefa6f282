#pragma once

#include <utility>

namespace terracost {

/// Affine anchor of a north-up raster. origin_x/origin_y are the world
/// coordinates of the center of cell (row 0, col 0); row index grows as
/// world y decreases (row 0 is the northernmost row).
struct GeoTransform {
    double origin_x = 0.0;    // meters, world x of column 0 center
    double origin_y = 0.0;    // meters, world y of row 0 center
    double resolution = 1.0;  // meters per cell, > 0

    bool operator==(const GeoTransform&) const = default;
};

struct GridCoord {
    double row = 0.0;  // fractional cells
    double col = 0.0;
};

inline GridCoord world_to_grid(const GeoTransform& geo, double x, double y) {
    return {(geo.origin_y - y) / geo.resolution, (x - geo.origin_x) / geo.resolution};
}

inline std::pair<double, double> grid_to_world(const GeoTransform& geo, double row, double col) {
    return {geo.origin_x + col * geo.resolution, geo.origin_y - row * geo.resolution};
}

}  // namespace terracost
