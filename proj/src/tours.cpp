#include "terracost/synth/tours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "terracost/core/errors.hpp"
#include "terracost/core/rng.hpp"

namespace terracost {

namespace {

struct Rect {
    double x0, y0, x1, y1;
    bool contains(double x, double y) const {
        return x >= x0 - 1e-9 && x <= x1 + 1e-9 && y >= y0 - 1e-9 && y <= y1 + 1e-9;
    }
};

struct Piece {
    Point a;
    Point b;
};

bool traversable_at(const Environment& env, double x, double y) {
    const auto g = world_to_grid(env.geo(), x, y);
    if (!env.class_map.in_bounds(g.row, g.col)) return false;
    return env.is_traversable(static_cast<int>(sample_nearest(env.class_map, g.row, g.col)));
}

bool traversable_between(const Environment& env, const Point& a, const Point& b, double step) {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        if (!traversable_at(env, a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)) return false;
    }
    return true;
}

// Traversable runs along parallel lines at `angle_deg`, spaced `spacing`
// apart with a seeded phase offset. Each run is clipped to the sweep rect.
std::vector<std::vector<Piece>> sweep_family(const Environment& env, const Rect& rect,
                                             double angle_deg, double spacing, double jitter01) {
    const double th = angle_deg * M_PI / 180.0;
    const double ax = std::cos(th), ay = std::sin(th);
    const double nx = -ay, ny = ax;
    const double step = env.geo().resolution;

    double n_lo = std::numeric_limits<double>::infinity(), n_hi = -n_lo;
    double a_lo = n_lo, a_hi = -n_lo;
    const double cx[4] = {rect.x0, rect.x1, rect.x0, rect.x1};
    const double cy[4] = {rect.y0, rect.y0, rect.y1, rect.y1};
    for (int i = 0; i < 4; ++i) {
        n_lo = std::min(n_lo, cx[i] * nx + cy[i] * ny);
        n_hi = std::max(n_hi, cx[i] * nx + cy[i] * ny);
        a_lo = std::min(a_lo, cx[i] * ax + cy[i] * ay);
        a_hi = std::max(a_hi, cx[i] * ax + cy[i] * ay);
    }

    const double min_len = std::max(0.5, 2.0 * step);
    std::vector<std::vector<Piece>> rows;
    for (double c = n_lo + jitter01 * spacing; c <= n_hi + 1e-9; c += spacing) {
        std::vector<Piece> pieces;
        bool in_run = false;
        double run_start = 0.0, run_end = 0.0;
        const auto flush = [&]() {
            if (in_run && run_end - run_start >= min_len) {
                pieces.push_back({{c * nx + run_start * ax, c * ny + run_start * ay},
                                  {c * nx + run_end * ax, c * ny + run_end * ay}});
            }
            in_run = false;
        };
        for (double s = a_lo; s <= a_hi + 1e-9; s += step) {
            const double px = c * nx + s * ax;
            const double py = c * ny + s * ay;
            if (rect.contains(px, py) && traversable_at(env, px, py)) {
                if (!in_run) {
                    in_run = true;
                    run_start = s;
                }
                run_end = s;
            } else {
                flush();
            }
        }
        flush();
        if (!pieces.empty()) rows.push_back(std::move(pieces));
    }
    return rows;
}

// Chains row pieces into boustrophedon paths, starting a fresh path whenever
// the straight connector to the next piece would leave traversable ground.
void chain_rows(const Environment& env, const std::vector<std::vector<Piece>>& rows,
                std::vector<Path>& out) {
    const double step = env.geo().resolution;
    std::vector<Point> current;
    const auto flush = [&]() {
        if (current.size() >= 2) out.emplace_back(current);
        current.clear();
    };
    const auto push = [&](const Point& p) {
        if (current.empty() || !(current.back() == p)) current.push_back(p);
    };

    for (std::size_t k = 0; k < rows.size(); ++k) {
        std::vector<Piece> pieces = rows[k];
        const bool reverse = (k % 2 == 1);
        if (reverse) {
            std::reverse(pieces.begin(), pieces.end());
            for (auto& p : pieces) std::swap(p.a, p.b);
        }
        for (const Piece& piece : pieces) {
            if (!current.empty() && !traversable_between(env, current.back(), piece.a, step)) {
                flush();
            }
            push(piece.a);
            push(piece.b);
        }
    }
    flush();
}

}  // namespace

std::vector<Path> make_coverage_tours(const Environment& env, const TourParams& params) {
    if (!(params.spacing > 0.0)) throw InvalidArgError("spacing must be positive");
    if (params.margin < 0.0) throw InvalidArgError("margin must be non-negative");

    const auto& geo = env.geo();
    const double r = geo.resolution;
    const double x_min = geo.origin_x - r / 2.0;
    const double x_max = geo.origin_x + (env.width() - 0.5) * r;
    const double y_max = geo.origin_y + r / 2.0;
    const double y_min = geo.origin_y - (env.height_cells() - 0.5) * r;
    const Rect rect{x_min + params.margin, y_min + params.margin,
                    x_max - params.margin, y_max - params.margin};
    if (rect.x1 - rect.x0 < params.spacing || rect.y1 - rect.y0 < params.spacing) {
        throw InvalidArgError("margin leaves no room for sweep lines");
    }

    std::vector<double> angles = {0.0, 90.0};
    if (params.diagonals) {
        angles.push_back(45.0);
        angles.push_back(135.0);
    }

    std::vector<Path> tours;
    for (std::size_t f = 0; f < angles.size(); ++f) {
        SplitMix64 rng(derive_seed(params.seed, 0x74'6F'75'72ULL, f));
        const auto rows = sweep_family(env, rect, angles[f], params.spacing, rng.uniform01());
        chain_rows(env, rows, tours);
    }
    return tours;
}

}  // namespace terracost
