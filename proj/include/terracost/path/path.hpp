#pragma once

#include <string>
#include <vector>

namespace terracost {

struct Point {
    double x = 0.0;  // meters, world frame
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

/// Polyline in the world frame: >= 2 points, no two consecutive identical.
struct Path {
    std::vector<Point> points;

    Path() = default;
    explicit Path(std::vector<Point> pts);

    double arc_length() const;
};

/// Unit piece of a path. heading_deg is the chord direction start -> end,
/// 0 = East, counter-clockwise positive, in [0, 360). chord <= d on curves.
struct Segment {
    Point start;
    Point end;
    double heading_deg = 0.0;
    double chord = 0.0;  // meters
};

/// Chord heading in degrees, [0, 360), 0 = East, CCW positive.
double heading_of(const Point& start, const Point& end);

/// Walks the polyline by arc length and emits one Segment per d meters of
/// arc. Segment endpoints are arc-length interpolated; a trailing remainder
/// shorter than d is dropped.
std::vector<Segment> segment_path(const Path& path, double d);

/// CSV `x,y` per line (one header line), meters, world frame.
Path load_path_csv(const std::string& path);
void save_path_csv(const Path& p, const std::string& path);

}  // namespace terracost
