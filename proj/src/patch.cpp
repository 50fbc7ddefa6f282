#include "terracost/patch/patch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "terracost/core/errors.hpp"

namespace terracost {

Patch extract_patch(const Environment& env, const Segment& seg, double d) {
    if (!(d > 0.0)) throw InvalidArgError("segment length d must be positive");
    const double r = env.geo().resolution;
    const double side = 2.0 * d;
    const double cells = side / r;
    const int s = static_cast<int>(std::llround(cells));
    if (s < 1 || std::abs(cells - s) > 1e-6) {
        throw ResolutionMismatchError("patch side " + std::to_string(side) +
                                      " is not a whole number of " + std::to_string(r) +
                                      " m cells");
    }

    const double cx = (seg.start.x + seg.end.x) / 2.0;
    const double cy = (seg.start.y + seg.end.y) / 2.0;
    const double th = seg.heading_deg * M_PI / 180.0;
    const double ct = std::cos(th);
    const double st = std::sin(th);

    // The whole rotated square must stay inside the sampling hull, not just
    // the cell-center lattice inside it.
    const double half = side / 2.0;
    const double corner_u[4] = {-half, half, half, -half};
    const double corner_v[4] = {-half, -half, half, half};
    for (int k = 0; k < 4; ++k) {
        const double wx = cx + corner_u[k] * ct - corner_v[k] * st;
        const double wy = cy + corner_u[k] * st + corner_v[k] * ct;
        const auto g = world_to_grid(env.geo(), wx, wy);
        if (!env.ortho.in_bounds(g.row, g.col)) {
            throw OutOfBoundsError("patch square exits raster at corner (" + std::to_string(wx) +
                                   ", " + std::to_string(wy) + ")");
        }
    }

    Patch patch;
    patch.s = s;
    patch.heading_deg = seg.heading_deg;
    patch.segment = seg;
    patch.ortho.resize(s, s);
    patch.class_plane.resize(s, s);
    patch.height.resize(s, s);

    Grid<double> height_raw(s, s);
    const double class_div = env.num_classes > 1 ? env.num_classes - 1.0 : 1.0;
    double h_min = std::numeric_limits<double>::infinity();

    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            const double u = (j + 0.5) * r - half;
            const double v = half - (i + 0.5) * r;
            const double wx = cx + u * ct - v * st;
            const double wy = cy + u * st + v * ct;
            const auto g = world_to_grid(env.geo(), wx, wy);

            const int label = static_cast<int>(sample_nearest(env.class_map, g.row, g.col));
            if (!env.is_traversable(label)) {
                throw NonTraversableError("patch covers class " + std::to_string(label) + " at (" +
                                          std::to_string(wx) + ", " + std::to_string(wy) + ")");
            }
            patch.class_plane(i, j) = static_cast<float>((label - 1.0) / class_div);
            patch.ortho(i, j) = static_cast<float>(sample_bilinear(env.ortho, g.row, g.col));

            const double h = sample_bilinear(env.height, g.row, g.col);
            height_raw(i, j) = h;
            h_min = std::min(h_min, h);
        }
    }

    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            const double rel = height_raw(i, j) - h_min;
            patch.height(i, j) = static_cast<float>(std::clamp(rel, 0.0, 1.0));
        }
    }
    return patch;
}

}  // namespace terracost
