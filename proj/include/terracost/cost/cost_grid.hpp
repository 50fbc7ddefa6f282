#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "terracost/cost/path_cost.hpp"

namespace terracost {

struct EdgeCost {
    double time = 0.0;    // s
    double energy = 0.0;  // J, floored at 0 so edge costs stay non-negative
};

/// Directed lattice over the environment with stride d: 8 outgoing edges per
/// node (0 = E, counter-clockwise through 7 = SE). Lattice rows grow
/// southward like raster rows; geo.resolution holds the stride.
struct CostGrid {
    GeoTransform geo;
    int rows = 0;
    int cols = 0;
    std::vector<std::array<std::optional<EdgeCost>, 8>> edges;
    std::vector<std::uint8_t> usable;  // nodes with traversable ground

    static constexpr int dir_dr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    static constexpr int dir_dc[8] = {1, 1, 0, -1, -1, -1, 0, 1};

    bool in_lattice(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }

    std::size_t node_index(int r, int c) const {
        return static_cast<std::size_t>(r) * cols + c;
    }

    const std::optional<EdgeCost>& edge(int r, int c, int dir) const {
        return edges[node_index(r, c)][dir];
    }
};

/// Builds the lattice by predicting one d-long patch per directed edge,
/// centered on the edge midpoint and heading along it; diagonal edges scale
/// time and energy by sqrt(2). Edges whose patch leaves the raster or
/// touches non-traversable ground are absent.
CostGrid build_cost_grid(const Environment& env, const PatchPredictor& predictor, double d);

enum class PlanObjective { Time, Energy };

struct PlanResult {
    Path path;      // node centers; empty when start and goal snap together
    PathCost cost;  // per-edge detail in lattice traversal order
};

/// Dijkstra over the chosen objective with deterministic (cost, row, col)
/// tie-breaking. Start and goal snap to the nearest node; UnreachableError
/// when either snaps to an unusable node or no route exists.
PlanResult plan(const CostGrid& grid, const Point& start, const Point& goal,
                PlanObjective objective);

/// `# key = value` geo header, then `row,col,dir,time_s,energy_j` rows in
/// row-major node order. Doubles are written with full precision, so equal
/// grids serialize byte-identically.
void save_cost_grid_csv(const CostGrid& grid, const std::string& path);
CostGrid load_cost_grid_csv(const std::string& path);

}  // namespace terracost
