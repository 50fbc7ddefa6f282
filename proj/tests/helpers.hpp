#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include "terracost/core/rng.hpp"
#include "terracost/env/environment.hpp"
#include "terracost/patch/patch.hpp"

namespace tctest {

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path root;

    TempDir() {
        static std::atomic<int> counter{0};
        root = std::filesystem::temp_directory_path() /
               ("terracost_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(root);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(root, ec);
    }

    std::string file(const std::string& name) const { return (root / name).string(); }
};

// Uniform single-class world spanning [0, cells*res] in both axes.
inline terracost::Environment flat_env(int cells, double res, int label = 7,
                                       float height = 600.0f) {
    terracost::GeoTransform geo{res / 2.0, (cells - 0.5) * res, res};
    terracost::Environment env;
    env.ortho = terracost::Raster(cells, cells, geo, terracost::RasterKind::Ortho, 0.5f);
    env.height = terracost::Raster(cells, cells, geo, terracost::RasterKind::Height, height);
    env.class_map = terracost::Raster(cells, cells, geo, terracost::RasterKind::Class,
                                      static_cast<float>(label));
    env.num_classes = 7;
    env.traversable = {4, 5, 6, 7};
    env.validate();
    return env;
}

// Planar height h = 600 + ax*x + ay*y over a flat single-class world.
inline terracost::Environment ramp_env(int cells, double res, double ax, double ay,
                                       int label = 7) {
    terracost::Environment env = flat_env(cells, res, label);
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const auto [x, y] = terracost::grid_to_world(env.geo(), i, j);
            env.height.data(i, j) = static_cast<float>(600.0 + ax * x + ay * y);
        }
    }
    return env;
}

// Uniform-noise patch for feeding networks directly.
inline terracost::Patch random_patch(int s, terracost::SplitMix64& rng) {
    terracost::Patch p;
    p.s = s;
    p.ortho.resize(s, s);
    p.class_plane.resize(s, s);
    p.height.resize(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            p.ortho(i, j) = static_cast<float>(rng.uniform01());
            p.class_plane(i, j) = static_cast<float>(rng.uniform01());
            p.height(i, j) = static_cast<float>(rng.uniform01());
        }
    }
    return p;
}

// Smooth deterministic ortho texture so interpolation tests see variation.
inline void texture_ortho(terracost::Environment& env, std::uint64_t seed) {
    terracost::SplitMix64 rng(seed);
    const int n = env.height_cells();
    const int m = env.width();
    const double fx = 2.0 + rng.uniform01() * 3.0;
    const double fy = 2.0 + rng.uniform01() * 3.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double u = static_cast<double>(i) / n;
            const double v = static_cast<double>(j) / m;
            env.ortho.data(i, j) = static_cast<float>(
                0.5 + 0.25 * std::sin(fx * 6.2831853 * u) * std::cos(fy * 6.2831853 * v));
        }
    }
}

}  // namespace tctest
