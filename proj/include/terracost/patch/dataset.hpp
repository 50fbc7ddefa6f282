#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "terracost/patch/patch.hpp"
#include "terracost/synth/simulate.hpp"

namespace terracost {

/// One supervised example: patch plus the power/velocity labels averaged
/// from the log records inside the segment's arc span. class_label is the
/// modal terrain class under the patch, slope_deg the mean directional
/// slope along the chord; both exist for grouped evaluation only.
struct Sample {
    Patch patch;
    double w_star = 0.0;  // W, > 0
    double v_star = 0.0;  // m/s, > 0
    int class_label = 0;
    double slope_deg = 0.0;
};

enum class SplitTag : std::uint8_t { Train = 0, Test = 1, Val = 2 };

/// Axis-aligned world rectangle, corners inclusive.
struct WorldRect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
};

struct DatasetBuildParams {
    double d = 1.0;               // segment length, meters
    double train_fraction = 0.8;
    double test_fraction = 0.2;   // fractions must sum to 1
    std::optional<WorldRect> val_region;  // segments with midpoint inside go to Val
    std::uint64_t seed = 0;
    int min_records = 3;          // segments with fewer log records are skipped
};

/// Patch dataset with per-sample split tags. Normalizers are the maxima of
/// the Train labels. The TCPD file keeps planes, labels and tags; segment
/// provenance (geometry, heading) lives in memory only.
struct Dataset {
    int s = 0;
    std::vector<Sample> samples;
    std::vector<SplitTag> tags;
    double max_w = 0.0;
    double max_v = 0.0;
    long long skipped = 0;  // degenerate or non-extractable segments

    std::vector<int> indices_of(SplitTag tag) const;
    long long count_of(SplitTag tag) const;
};

/// Segments every log polyline into d-meter pieces, labels each from the
/// records inside its arc span (w* = mean voltage*current, v* = d over the
/// first-to-last record time), extracts the patch and assigns splits:
/// val_region first, then a seeded 80/20-style shuffle of the rest.
Dataset build_dataset(const Environment& env, const std::vector<TrajectoryLog>& logs,
                      const DatasetBuildParams& params);

/// TCPD v1 container (little-endian): magic "TCPD", version u16, s u32,
/// count u64, per record 3*s*s f32 planes (ortho, class, height), w* f32,
/// v* f32, class u8, slope f32, split u8; trailer max_w f32, max_v f32.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);

}  // namespace terracost
