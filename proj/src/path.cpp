#include "terracost/path/path.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "terracost/core/errors.hpp"

namespace terracost {

namespace {

double dist(const Point& a, const Point& b) {
    return std::hypot(b.x - a.x, b.y - a.y);
}

Point lerp(const Point& a, const Point& b, double t) {
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

}  // namespace

Path::Path(std::vector<Point> pts) : points(std::move(pts)) {
    if (points.size() < 2) throw DegeneratePathError("path needs at least 2 points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i] == points[i - 1]) {
            throw DegeneratePathError("consecutive identical points at index " + std::to_string(i));
        }
    }
}

double Path::arc_length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) total += dist(points[i - 1], points[i]);
    return total;
}

double heading_of(const Point& start, const Point& end) {
    if (start == end) throw DegeneratePathError("heading of zero-length segment");
    double deg = std::atan2(end.y - start.y, end.x - start.x) * 180.0 / M_PI;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg = 0.0;
    return deg;
}

std::vector<Segment> segment_path(const Path& path, double d) {
    if (!(d > 0.0)) throw InvalidArgError("segment length d must be positive");
    if (path.points.size() < 2) throw DegeneratePathError("path needs at least 2 points");

    // Point on the polyline at a given arc position, walking edge by edge.
    std::vector<Segment> segments;
    const auto& pts = path.points;

    std::size_t edge = 0;              // current edge index [edge, edge+1]
    double edge_start_arc = 0.0;       // arc position of pts[edge]
    double edge_len = dist(pts[0], pts[1]);

    const auto point_at = [&](double arc) -> Point {
        while (edge + 2 < pts.size() && arc > edge_start_arc + edge_len + 1e-12) {
            edge_start_arc += edge_len;
            ++edge;
            edge_len = dist(pts[edge], pts[edge + 1]);
        }
        double t = (arc - edge_start_arc) / edge_len;
        t = std::max(0.0, std::min(1.0, t));
        return lerp(pts[edge], pts[edge + 1], t);
    };

    const double total = path.arc_length();
    const auto count = static_cast<std::size_t>(std::floor(total / d + 1e-12));
    segments.reserve(count);
    Point prev = point_at(0.0);
    for (std::size_t i = 1; i <= count; ++i) {
        Point next = point_at(static_cast<double>(i) * d);
        Segment seg;
        seg.start = prev;
        seg.end = next;
        seg.heading_deg = heading_of(prev, next);
        seg.chord = dist(prev, next);
        segments.push_back(seg);
        prev = next;
    }
    return segments;
}

Path load_path_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open path csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty path csv: " + path);
    std::vector<Point> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        Point p;
        char comma = 0;
        if (!(ss >> p.x >> comma >> p.y) || comma != ',') {
            throw FormatError("bad path csv line: " + line);
        }
        pts.push_back(p);
    }
    return Path(std::move(pts));
}

void save_path_csv(const Path& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write path csv: " + path);
    out << "x,y\n";
    char buf[80];
    for (const Point& pt : p.points) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", pt.x, pt.y);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace terracost
