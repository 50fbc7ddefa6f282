#pragma once

#include <set>
#include <string>

#include "terracost/env/raster.hpp"

namespace terracost {

/// Three-layer environment bundle. All rasters share one geo-transform and
/// shape. Class labels run 1..num_classes with 0 reserved for no-data;
/// traversable is the subset of labels the robot may drive on.
struct Environment {
    Raster ortho;
    Raster height;
    Raster class_map;
    int num_classes = 0;
    std::set<int> traversable;

    bool is_traversable(int label) const { return traversable.count(label) > 0; }

    const GeoTransform& geo() const { return ortho.geo; }
    int width() const { return ortho.width; }
    int height_cells() const { return ortho.height; }

    /// Throws InvalidArgError when the bundle invariants are violated.
    void validate() const;
};

/// Directory layout: ortho.tcrs, height.tcrs, class.tcrs, env.cfg
/// (num_classes, traversable).
Environment load_environment(const std::string& dir);
void save_environment(const Environment& env, const std::string& dir);

}  // namespace terracost
