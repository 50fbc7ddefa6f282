#pragma once

#include <cstdint>
#include <vector>

#include "terracost/env/environment.hpp"
#include "terracost/path/path.hpp"

namespace terracost {

struct TourParams {
    double spacing = 1.0;   // meters between sweep lines
    double margin = 2.5;    // keep-out from the raster edge / no-data border
    bool diagonals = true;  // add 45-degree sweeps for heading variety
    std::uint64_t seed = 0;
};

/// Boustrophedon coverage tours over the traversable interior: one west-east
/// serpentine, one south-north serpentine, and optionally two diagonal
/// sweeps. Rows that would leave traversable terrain are clipped into
/// traversable sub-spans, each emitted as its own tour.
std::vector<Path> make_coverage_tours(const Environment& env, const TourParams& params);

}  // namespace terracost
