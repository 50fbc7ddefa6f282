#include "terracost/env/raster.hpp"

#include <cmath>
#include <fstream>

#include "terracost/core/binio.hpp"
#include "terracost/core/errors.hpp"

namespace terracost {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'R', 'S'};
constexpr std::uint16_t kVersion = 1;

// Fractional indices within this many cells of an integer are treated as
// exact, so cell-center samples are not polluted by coordinate round-off.
constexpr double kSnapTol = 1e-9;

double snap_index(double v) {
    double r = std::round(v);
    return std::abs(v - r) < kSnapTol ? r : v;
}

void check_sample_bounds(const Raster& raster, double row, double col) {
    if (!raster.in_bounds(row, col)) {
        throw OutOfBoundsError("sample (" + std::to_string(row) + ", " + std::to_string(col) +
                               ") outside raster " + std::to_string(raster.height) + "x" +
                               std::to_string(raster.width));
    }
}

}  // namespace

Raster::Raster(int width_, int height_, GeoTransform geo_, RasterKind kind_, float fill)
    : width(width_), height(height_), geo(geo_), kind(kind_) {
    if (width <= 0 || height <= 0) throw InvalidArgError("raster dimensions must be positive");
    if (geo.resolution <= 0.0) throw InvalidArgError("raster resolution must be positive");
    data = Grid<float>::Constant(height, width, fill);
}

double sample_bilinear(const Raster& raster, double row, double col) {
    row = snap_index(row);
    col = snap_index(col);
    check_sample_bounds(raster, row, col);

    int r0 = static_cast<int>(std::floor(row));
    int c0 = static_cast<int>(std::floor(col));
    r0 = std::min(r0, raster.height - 1);
    c0 = std::min(c0, raster.width - 1);
    const int r1 = std::min(r0 + 1, raster.height - 1);
    const int c1 = std::min(c0 + 1, raster.width - 1);
    const double fr = row - r0;
    const double fc = col - c0;

    const double v00 = raster.data(r0, c0);
    const double v01 = raster.data(r0, c1);
    const double v10 = raster.data(r1, c0);
    const double v11 = raster.data(r1, c1);
    return v00 * (1.0 - fr) * (1.0 - fc) + v01 * (1.0 - fr) * fc +
           v10 * fr * (1.0 - fc) + v11 * fr * fc;
}

double sample_nearest(const Raster& raster, double row, double col) {
    row = snap_index(row);
    col = snap_index(col);
    check_sample_bounds(raster, row, col);
    // ceil(x - 0.5) rounds half down.
    int r = static_cast<int>(std::ceil(row - 0.5));
    int c = static_cast<int>(std::ceil(col - 0.5));
    r = std::max(0, std::min(r, raster.height - 1));
    c = std::max(0, std::min(c, raster.width - 1));
    return raster.data(r, c);
}

Raster load_raster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open raster: " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad TCRS magic: " + path);

    const auto version = read_le<std::uint16_t>(in, "version");
    if (version != kVersion) throw FormatError("unsupported TCRS version " + std::to_string(version));
    const auto kind_raw = read_le<std::uint8_t>(in, "kind");
    if (kind_raw > 2) throw FormatError("unknown raster kind " + std::to_string(kind_raw));
    const auto reserved = read_le<std::uint8_t>(in, "reserved");
    if (reserved != 0) throw FormatError("nonzero reserved byte");
    const auto width = read_le<std::uint32_t>(in, "width");
    const auto height = read_le<std::uint32_t>(in, "height");
    if (width == 0 || height == 0) throw FormatError("zero raster dimension");

    GeoTransform geo;
    geo.origin_x = read_le<double>(in, "origin_x");
    geo.origin_y = read_le<double>(in, "origin_y");
    geo.resolution = read_le<double>(in, "resolution");
    if (!(geo.resolution > 0.0)) throw FormatError("non-positive resolution");

    Raster raster(static_cast<int>(width), static_cast<int>(height), geo,
                  static_cast<RasterKind>(kind_raw));
    read_bytes(in, raster.data.data(), sizeof(float) * width * height, "samples");

    // Must be exactly at EOF.
    in.peek();
    if (!in.eof()) throw FormatError("trailing bytes after samples: " + path);
    return raster;
}

void save_raster(const Raster& raster, const std::string& path) {
    if (raster.width <= 0 || raster.height <= 0 ||
        raster.data.rows() != raster.height || raster.data.cols() != raster.width) {
        throw InvalidArgError("raster shape inconsistent with data");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write raster: " + path);

    out.write(kMagic, 4);
    write_le<std::uint16_t>(out, kVersion);
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(raster.kind));
    write_le<std::uint8_t>(out, 0);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(raster.width));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(raster.height));
    write_le<double>(out, raster.geo.origin_x);
    write_le<double>(out, raster.geo.origin_y);
    write_le<double>(out, raster.geo.resolution);
    write_bytes(out, raster.data.data(), sizeof(float) * raster.width * raster.height);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace terracost
