#include "terracost/synth/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "terracost/core/errors.hpp"
#include "terracost/core/rng.hpp"

namespace terracost {

namespace {

// Height field character: fractal noise is laid down on a coarse lattice and
// bilinearly refined to cell resolution, so slopes vary on the meter scale
// instead of flickering cell to cell.
constexpr int kCoarseStepCells = 16;
constexpr double kDatum = 600.0;  // meters above sea level for the flat reference

// Diamond-square on a (2^k + 1)^2 lattice. Displacement amplitude decays by
// `roughness` per level.
std::vector<double> diamond_square(int size, double roughness, SplitMix64& rng) {
    std::vector<double> g(static_cast<std::size_t>(size) * size, 0.0);
    const auto at = [&](int i, int j) -> double& { return g[static_cast<std::size_t>(i) * size + j]; };

    double amp = 1.0;
    at(0, 0) = rng.uniform(-amp, amp);
    at(0, size - 1) = rng.uniform(-amp, amp);
    at(size - 1, 0) = rng.uniform(-amp, amp);
    at(size - 1, size - 1) = rng.uniform(-amp, amp);

    for (int step = size - 1; step > 1; step /= 2) {
        const int half = step / 2;
        // Diamond: square centers from their four corners.
        for (int i = half; i < size; i += step) {
            for (int j = half; j < size; j += step) {
                const double mean = (at(i - half, j - half) + at(i - half, j + half) +
                                     at(i + half, j - half) + at(i + half, j + half)) / 4.0;
                at(i, j) = mean + rng.uniform(-amp, amp);
            }
        }
        // Square: edge midpoints from their (up to four) diamond neighbors.
        for (int i = 0; i < size; i += half) {
            for (int j = ((i / half) % 2 == 0) ? half : 0; j < size; j += step) {
                double sum = 0.0;
                int n = 0;
                if (i - half >= 0) { sum += at(i - half, j); ++n; }
                if (i + half < size) { sum += at(i + half, j); ++n; }
                if (j - half >= 0) { sum += at(i, j - half); ++n; }
                if (j + half < size) { sum += at(i, j + half); ++n; }
                at(i, j) = sum / n + rng.uniform(-amp, amp);
            }
        }
        amp *= roughness;
    }
    return g;
}

void validate_params(const GenerateParams& p, const OracleConfig& oracle) {
    if (!(p.resolution > 0.0)) throw InvalidArgError("resolution must be positive");
    if (p.width_m < 2.0 * p.resolution || p.height_m < 2.0 * p.resolution) {
        throw InvalidArgError("environment must span at least 2 cells per axis");
    }
    if (p.num_classes < 1) throw InvalidArgError("num_classes must be >= 1");
    if (p.roughness < 0.0 || p.roughness > 1.0) throw InvalidArgError("roughness must be in [0,1]");
    if (!(p.max_slope_deg > 0.0) || p.max_slope_deg >= 45.0) {
        throw InvalidArgError("max_slope_deg must be in (0, 45)");
    }
    if (p.border_m < 0.0) throw InvalidArgError("border_m must be non-negative");
    if (p.num_regions < 0) throw InvalidArgError("num_regions must be non-negative");
    oracle.validate();
    for (const auto& t : oracle.terrain) {
        if (t.class_label > p.num_classes) {
            throw InvalidArgError("terrain class " + std::to_string(t.class_label) +
                                  " exceeds num_classes " + std::to_string(p.num_classes));
        }
    }
}

}  // namespace

Environment generate_environment(const GenerateParams& params, const OracleConfig& oracle) {
    validate_params(params, oracle);

    const double r = params.resolution;
    const int w = static_cast<int>(std::llround(params.width_m / r));
    const int h = static_cast<int>(std::llround(params.height_m / r));

    GeoTransform geo;
    geo.resolution = r;
    geo.origin_x = r / 2.0;
    geo.origin_y = (h - 0.5) * r;  // row 0 is the northernmost row

    Environment env;
    env.ortho = Raster(w, h, geo, RasterKind::Ortho);
    env.height = Raster(w, h, geo, RasterKind::Height);
    env.class_map = Raster(w, h, geo, RasterKind::Class);
    env.num_classes = params.num_classes;
    for (const auto& t : oracle.terrain) env.traversable.insert(t.class_label);

    // Heights.
    if (params.roughness <= 0.0) {
        env.height.data.setConstant(static_cast<float>(kDatum));
    } else {
        const int need = (std::max(w, h) - 1 + kCoarseStepCells - 1) / kCoarseStepCells;
        int size = 2;
        while (size < need + 1) size = (size - 1) * 2 + 1;
        if (size < 3) size = 3;

        SplitMix64 height_rng(derive_seed(params.seed, 0x48'65'69'67ULL));
        const std::vector<double> coarse = diamond_square(size, params.roughness, height_rng);
        const auto coarse_at = [&](int i, int j) {
            return coarse[static_cast<std::size_t>(i) * size + j];
        };

        Grid<double> fine(h, w);
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                const double ci = static_cast<double>(i) / kCoarseStepCells;
                const double cj = static_cast<double>(j) / kCoarseStepCells;
                const int i0 = std::min(static_cast<int>(ci), size - 2);
                const int j0 = std::min(static_cast<int>(cj), size - 2);
                const double fi = ci - i0;
                const double fj = cj - j0;
                fine(i, j) = coarse_at(i0, j0) * (1.0 - fi) * (1.0 - fj) +
                             coarse_at(i0, j0 + 1) * (1.0 - fi) * fj +
                             coarse_at(i0 + 1, j0) * fi * (1.0 - fj) +
                             coarse_at(i0 + 1, j0 + 1) * fi * fj;
            }
        }

        double max_grad = 0.0;
        for (int i = 1; i + 1 < h; ++i) {
            for (int j = 1; j + 1 < w; ++j) {
                const double gx = (fine(i, j + 1) - fine(i, j - 1)) / (2.0 * r);
                const double gy = (fine(i - 1, j) - fine(i + 1, j)) / (2.0 * r);
                max_grad = std::max(max_grad, std::hypot(gx, gy));
            }
        }
        const double scale =
            max_grad > 0.0 ? std::tan(params.max_slope_deg * M_PI / 180.0) / max_grad : 0.0;
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                env.height.data(i, j) = static_cast<float>(kDatum + fine(i, j) * scale);
            }
        }
    }

    // Class regions: Voronoi over traversable labels, class 0 border frame.
    const std::vector<int> labels(env.traversable.begin(), env.traversable.end());
    const double area = params.width_m * params.height_m;
    const int regions = params.num_regions > 0
                            ? params.num_regions
                            : std::max(static_cast<int>(labels.size()),
                                       static_cast<int>(std::llround(area / 60.0)));
    if (regions < static_cast<int>(labels.size())) {
        throw InvalidArgError("num_regions must cover every traversable class");
    }

    const auto border_cell = [&](int i, int j) {
        const double from_west = (j + 0.5) * r;
        const double from_east = (w - j - 0.5) * r;
        const double from_north = (i + 0.5) * r;
        const double from_south = (h - i - 0.5) * r;
        return std::min(std::min(from_west, from_east), std::min(from_north, from_south)) <
               params.border_m;
    };

    std::vector<double> site_x(regions), site_y(regions);
    std::vector<int> site_label(regions);
    std::vector<long long> label_counts(labels.size());
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= 32) throw InvalidArgError("could not place all traversable classes");
        SplitMix64 rng(derive_seed(params.seed, 0x56'6F'72ULL, attempt));
        for (int k = 0; k < regions; ++k) {
            site_x[k] = rng.uniform(0.0, params.width_m);
            site_y[k] = rng.uniform(0.0, params.height_m);
        }
        std::vector<int> order(labels.begin(), labels.end());
        rng.shuffle(order);
        for (int k = 0; k < regions; ++k) {
            site_label[k] = k < static_cast<int>(order.size())
                                ? order[k]
                                : labels[rng.below(labels.size())];
        }

        std::fill(label_counts.begin(), label_counts.end(), 0);
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                if (border_cell(i, j)) {
                    env.class_map.data(i, j) = 0.0f;
                    continue;
                }
                const auto [cx, cy] = grid_to_world(geo, i, j);
                int best = 0;
                double best_d2 = std::numeric_limits<double>::infinity();
                for (int k = 0; k < regions; ++k) {
                    const double dx = cx - site_x[k];
                    const double dy = cy - site_y[k];
                    const double d2 = dx * dx + dy * dy;
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best = k;
                    }
                }
                const int label = site_label[best];
                env.class_map.data(i, j) = static_cast<float>(label);
                const auto it = std::find(labels.begin(), labels.end(), label);
                ++label_counts[static_cast<std::size_t>(it - labels.begin())];
            }
        }
        if (std::all_of(label_counts.begin(), label_counts.end(),
                        [](long long c) { return c > 0; })) {
            break;
        }
    }

    // Orthophoto: per-class gray with seeded texture noise, black over no-data.
    SplitMix64 ortho_rng(derive_seed(params.seed, 0x4F'72'74ULL));
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const int label = static_cast<int>(env.class_map.data(i, j));
            if (label == 0) {
                env.ortho.data(i, j) = 0.0f;
                continue;
            }
            const TerrainParams& t = oracle.params_for(label);
            const double v = t.ortho_mean + t.ortho_noise * ortho_rng.gaussian();
            env.ortho.data(i, j) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }

    env.validate();
    return env;
}

}  // namespace terracost
