#pragma once

#include <Eigen/Core>
#include <string>

#include "terracost/env/geo.hpp"

namespace terracost {

/// Row-major dense grid, row 0 first (matches the TCRS file layout).
template <class T>
using Grid = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class RasterKind : std::uint8_t { Ortho = 0, Height = 1, Class = 2 };

/// Geo-referenced scalar raster. Ortho holds grayscale in [0,1], Height
/// meters above datum, Class integer labels (0 = no data). Immutable by
/// convention once built; all sampling is const and thread-safe.
struct Raster {
    int width = 0;   // cells
    int height = 0;  // cells
    GeoTransform geo;
    RasterKind kind = RasterKind::Ortho;
    Grid<float> data;  // height x width

    Raster() = default;
    Raster(int width_, int height_, GeoTransform geo_, RasterKind kind_, float fill = 0.0f);

    float at(int row, int col) const { return data(row, col); }

    bool in_bounds(double row, double col) const {
        return row >= 0.0 && col >= 0.0 &&
               row <= static_cast<double>(height - 1) &&
               col <= static_cast<double>(width - 1);
    }
};

/// Bilinear interpolation of the four surrounding cells. Indices within
/// 1e-9 cells of an integer are snapped so cell-center lookups reproduce
/// stored values exactly. Continuous layers only (Ortho, Height).
double sample_bilinear(const Raster& raster, double row, double col);

/// Nearest-cell lookup for the class layer; ties at .5 round half down in
/// both axes.
double sample_nearest(const Raster& raster, double row, double col);

/// TCRS v1 container (little-endian): magic "TCRS", version u16, kind u8,
/// reserved u8, width u32, height u32, origin f64 x2, resolution f64,
/// then width*height f32 row-major samples.
Raster load_raster(const std::string& path);
void save_raster(const Raster& raster, const std::string& path);

}  // namespace terracost
