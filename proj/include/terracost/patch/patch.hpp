#pragma once

#include "terracost/env/environment.hpp"
#include "terracost/path/path.hpp"

namespace terracost {

/// Oriented, normalized s x s crop around one path segment. Row 0 is the
/// left edge of travel, column 0 the rear; the chord runs along the middle
/// row toward increasing columns. Channels: ortho raw grayscale in [0,1],
/// class (label - 1) / (num_classes - 1), height meters above the patch
/// minimum clipped to [0,1]. Stored as f32 planes.
struct Patch {
    int s = 0;
    Grid<float> ortho;
    Grid<float> class_plane;
    Grid<float> height;
    double heading_deg = 0.0;
    Segment segment;
};

/// Cuts the 2d x 2d square centered on the segment midpoint and rotated by
/// the chord heading, so the segment runs along the middle row with d/2 of
/// surrounding context on every side. s = 2d / resolution, which must be
/// integral within 1e-6 (ResolutionMismatchError otherwise). Ortho and
/// height are sampled bilinearly, class nearest. Throws OutOfBoundsError
/// when the square exits the raster and NonTraversableError when any
/// sampled class cell is no-data or not traversable.
Patch extract_patch(const Environment& env, const Segment& seg, double d);

}  // namespace terracost
