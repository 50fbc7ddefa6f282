#include "terracost/cost/cost_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>

#include "terracost/core/config.hpp"
#include "terracost/core/errors.hpp"

namespace terracost {

namespace {

constexpr double kMinVelocity = 1e-6;
constexpr std::size_t kPredictChunk = 512;

std::pair<double, double> node_world(const CostGrid& grid, int r, int c) {
    return {grid.geo.origin_x + c * grid.geo.resolution,
            grid.geo.origin_y - r * grid.geo.resolution};
}

}  // namespace

CostGrid build_cost_grid(const Environment& env, const PatchPredictor& predictor, double d) {
    if (!(d > 0.0)) throw InvalidArgError("lattice stride d must be positive");
    const double r_env = env.geo().resolution;

    CostGrid grid;
    grid.geo = GeoTransform{env.geo().origin_x, env.geo().origin_y, d};
    grid.cols = static_cast<int>(std::floor((env.width() - 1) * r_env / d + 1e-9)) + 1;
    grid.rows = static_cast<int>(std::floor((env.height_cells() - 1) * r_env / d + 1e-9)) + 1;
    grid.edges.assign(static_cast<std::size_t>(grid.rows) * grid.cols, {});
    grid.usable.assign(grid.edges.size(), 0);

    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const auto [x, y] = node_world(grid, r, c);
            const auto g = world_to_grid(env.geo(), x, y);
            if (!env.class_map.in_bounds(g.row, g.col)) continue;
            const int label = static_cast<int>(sample_nearest(env.class_map, g.row, g.col));
            grid.usable[grid.node_index(r, c)] = env.is_traversable(label) ? 1 : 0;
        }
    }

    struct Candidate {
        int r, c, dir;
        double length;
    };
    std::vector<Candidate> candidates;
    std::vector<Patch> patches;
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            if (!grid.usable[grid.node_index(r, c)]) continue;
            for (int dir = 0; dir < 8; ++dir) {
                const int nr = r + CostGrid::dir_dr[dir];
                const int nc = c + CostGrid::dir_dc[dir];
                if (!grid.in_lattice(nr, nc) || !grid.usable[grid.node_index(nr, nc)]) continue;

                const auto [ax, ay] = node_world(grid, r, c);
                const auto [bx, by] = node_world(grid, nr, nc);
                const double length = std::hypot(bx - ax, by - ay);
                const double ux = (bx - ax) / length;
                const double uy = (by - ay) / length;
                Segment seg;
                seg.start = {(ax + bx) / 2.0 - ux * d / 2.0, (ay + by) / 2.0 - uy * d / 2.0};
                seg.end = {(ax + bx) / 2.0 + ux * d / 2.0, (ay + by) / 2.0 + uy * d / 2.0};
                seg.heading_deg = heading_of(seg.start, seg.end);
                seg.chord = d;
                try {
                    patches.push_back(extract_patch(env, seg, d));
                } catch (const Error&) {
                    continue;
                }
                candidates.push_back({r, c, dir, length});
            }
        }
    }

    for (std::size_t at = 0; at < candidates.size(); at += kPredictChunk) {
        const std::size_t n = std::min(kPredictChunk, candidates.size() - at);
        const std::vector<Patch> chunk(patches.begin() + at, patches.begin() + at + n);
        const auto preds = predictor(chunk);
        if (preds.size() != n) {
            throw ShapeMismatchError("predictor returned " + std::to_string(preds.size()) +
                                     " results for " + std::to_string(n) + " patches");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Candidate& cand = candidates[at + i];
            EdgeCost ec;
            ec.time = cand.length / std::max(preds[i].second, kMinVelocity);
            ec.energy = std::max(preds[i].first, 0.0) * ec.time;
            grid.edges[grid.node_index(cand.r, cand.c)][cand.dir] = ec;
        }
    }
    return grid;
}

PlanResult plan(const CostGrid& grid, const Point& start, const Point& goal,
                PlanObjective objective) {
    const auto snap = [&](const Point& p, const char* what) {
        const int c = static_cast<int>(std::llround((p.x - grid.geo.origin_x) / grid.geo.resolution));
        const int r = static_cast<int>(std::llround((grid.geo.origin_y - p.y) / grid.geo.resolution));
        if (!grid.in_lattice(r, c) || !grid.usable[grid.node_index(r, c)]) {
            throw UnreachableError(std::string(what) + " (" + std::to_string(p.x) + ", " +
                                   std::to_string(p.y) + ") does not snap to a traversable node");
        }
        return std::pair<int, int>{r, c};
    };
    const auto [sr, sc] = snap(start, "start");
    const auto [gr, gc] = snap(goal, "goal");

    PlanResult result;
    if (sr == gr && sc == gc) return result;

    const std::size_t n = grid.edges.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, inf);
    std::vector<int> parent_node(n, -1);
    std::vector<int> parent_dir(n, -1);

    using QItem = std::tuple<double, int, int>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> queue;
    dist[grid.node_index(sr, sc)] = 0.0;
    queue.emplace(0.0, sr, sc);

    while (!queue.empty()) {
        const auto [cost, r, c] = queue.top();
        queue.pop();
        const std::size_t idx = grid.node_index(r, c);
        if (cost != dist[idx]) continue;
        if (r == gr && c == gc) break;
        for (int dir = 0; dir < 8; ++dir) {
            const auto& edge = grid.edges[idx][dir];
            if (!edge) continue;
            const int nr = r + CostGrid::dir_dr[dir];
            const int nc = c + CostGrid::dir_dc[dir];
            const std::size_t nidx = grid.node_index(nr, nc);
            const double w = objective == PlanObjective::Time ? edge->time : edge->energy;
            const double nd = cost + w;
            if (nd < dist[nidx]) {
                dist[nidx] = nd;
                parent_node[nidx] = static_cast<int>(idx);
                parent_dir[nidx] = dir;
                queue.emplace(nd, nr, nc);
            }
        }
    }

    const std::size_t goal_idx = grid.node_index(gr, gc);
    if (dist[goal_idx] == inf) {
        throw UnreachableError("no route between the snapped start and goal nodes");
    }

    std::vector<std::size_t> nodes;
    std::vector<int> dirs;
    for (std::size_t at = goal_idx; at != grid.node_index(sr, sc);) {
        nodes.push_back(at);
        dirs.push_back(parent_dir[at]);
        at = static_cast<std::size_t>(parent_node[at]);
    }
    nodes.push_back(grid.node_index(sr, sc));
    std::reverse(nodes.begin(), nodes.end());
    std::reverse(dirs.begin(), dirs.end());

    std::vector<Point> points;
    points.reserve(nodes.size());
    for (std::size_t idx : nodes) {
        const int r = static_cast<int>(idx) / grid.cols;
        const int c = static_cast<int>(idx) % grid.cols;
        const auto [x, y] = node_world(grid, r, c);
        points.push_back({x, y});
    }
    result.path = Path(std::move(points));

    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const std::size_t from = nodes[k];
        const auto& edge = grid.edges[from][dirs[k]];
        const double length =
            grid.geo.resolution * ((dirs[k] % 2 == 0) ? 1.0 : std::sqrt(2.0));
        SegmentCost sc2;
        sc2.time = edge->time;
        sc2.energy = edge->energy;
        sc2.v = length / edge->time;
        sc2.w = edge->energy / edge->time;
        result.cost.total_time += sc2.time;
        result.cost.total_energy += sc2.energy;
        result.cost.covered_length += length;
        result.cost.segments.push_back(sc2);
    }
    return result;
}

void save_cost_grid_csv(const CostGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write cost grid: " + path);
    char buf[200];
    std::snprintf(buf, sizeof(buf), "# origin_x = %.17g\n", grid.geo.origin_x);
    out << buf;
    std::snprintf(buf, sizeof(buf), "# origin_y = %.17g\n", grid.geo.origin_y);
    out << buf;
    std::snprintf(buf, sizeof(buf), "# stride = %.17g\n", grid.geo.resolution);
    out << buf;
    out << "# rows = " << grid.rows << "\n";
    out << "# cols = " << grid.cols << "\n";
    out << "row,col,dir,time_s,energy_j\n";
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            for (int dir = 0; dir < 8; ++dir) {
                const auto& edge = grid.edge(r, c, dir);
                if (!edge) continue;
                std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g\n", r, c, dir, edge->time,
                              edge->energy);
                out << buf;
            }
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

CostGrid load_cost_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open cost grid: " + path);

    KeyValueConfig header;
    std::string line;
    bool saw_columns = false;
    std::vector<std::tuple<int, int, int, double, double>> rows;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::size_t eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                std::string value = line.substr(eq + 1);
                const auto trim = [](std::string& s) {
                    const auto a = s.find_first_not_of(" \t\r");
                    const auto b = s.find_last_not_of(" \t\r");
                    s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
                };
                trim(key);
                trim(value);
                header.set(key, value);
            }
            continue;
        }
        if (!saw_columns) {
            if (line.find("row,col,dir") != 0) {
                throw FormatError("cost grid line " + std::to_string(lineno) +
                                  " is not the column header");
            }
            saw_columns = true;
            continue;
        }
        std::istringstream ss(line);
        int r = 0, c = 0, dir = 0;
        double time = 0.0, energy = 0.0;
        char d1 = 0, d2 = 0, d3 = 0, d4 = 0;
        if (!(ss >> r >> d1 >> c >> d2 >> dir >> d3 >> time >> d4 >> energy) || d1 != ',' ||
            d2 != ',' || d3 != ',' || d4 != ',') {
            throw FormatError("bad cost grid line " + std::to_string(lineno) + ": " + line);
        }
        rows.emplace_back(r, c, dir, time, energy);
    }

    CostGrid grid;
    grid.geo.origin_x = header.get_double("origin_x");
    grid.geo.origin_y = header.get_double("origin_y");
    grid.geo.resolution = header.get_double("stride");
    grid.rows = static_cast<int>(header.get_int("rows"));
    grid.cols = static_cast<int>(header.get_int("cols"));
    if (grid.rows < 1 || grid.cols < 1 || !(grid.geo.resolution > 0.0)) {
        throw FormatError("cost grid header has implausible dimensions");
    }
    grid.edges.assign(static_cast<std::size_t>(grid.rows) * grid.cols, {});
    grid.usable.assign(grid.edges.size(), 0);

    for (const auto& [r, c, dir, time, energy] : rows) {
        if (!grid.in_lattice(r, c) || dir < 0 || dir > 7) {
            throw FormatError("cost grid edge outside lattice");
        }
        const int nr = r + CostGrid::dir_dr[dir];
        const int nc = c + CostGrid::dir_dc[dir];
        if (!grid.in_lattice(nr, nc)) throw FormatError("cost grid edge leaves lattice");
        if (!(time > 0.0) || energy < 0.0) throw FormatError("cost grid edge has invalid cost");
        grid.edges[grid.node_index(r, c)][dir] = EdgeCost{time, energy};
        grid.usable[grid.node_index(r, c)] = 1;
        grid.usable[grid.node_index(nr, nc)] = 1;
    }
    return grid;
}

}  // namespace terracost
