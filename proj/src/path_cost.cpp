#include "terracost/cost/path_cost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "terracost/core/errors.hpp"
#include "terracost/path/path.hpp"

namespace terracost {

namespace {

constexpr double kMinVelocity = 1e-6;  // m/s floor before dividing

}  // namespace

PatchPredictor make_model_predictor(Model<double>& model) {
    return [&model](const std::vector<Patch>& patches) {
        std::vector<const Patch*> ptrs(patches.size());
        for (std::size_t i = 0; i < patches.size(); ++i) ptrs[i] = &patches[i];
        return model.predict(ptrs);
    };
}

PathCost path_cost(const Environment& env, const PatchPredictor& predictor, const Path& path,
                   double d) {
    const std::vector<Segment> segments = segment_path(path, d);
    if (segments.empty()) {
        throw EmptyPathError("path of length " + std::to_string(path.arc_length()) +
                             " m yields no " + std::to_string(d) + " m segment");
    }

    std::vector<Patch> patches;
    patches.reserve(segments.size());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        try {
            patches.push_back(extract_patch(env, segments[k], d));
        } catch (const Error& e) {
            throw NonTraversableError("segment " + std::to_string(k) + ": " + e.what());
        }
    }

    const auto preds = predictor(patches);
    if (preds.size() != segments.size()) {
        throw ShapeMismatchError("predictor returned " + std::to_string(preds.size()) +
                                 " results for " + std::to_string(segments.size()) + " segments");
    }

    PathCost cost;
    cost.segments.reserve(segments.size());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        SegmentCost sc;
        sc.w = preds[k].first;
        sc.v = preds[k].second;
        sc.time = d / std::max(sc.v, kMinVelocity);
        sc.energy = sc.w * sc.time;
        cost.total_time += sc.time;
        cost.total_energy += sc.energy;
        cost.covered_length += d;
        cost.segments.push_back(sc);
    }
    return cost;
}

double energy_from_log(const TrajectoryLog& log, double t_start, double t_goal) {
    if (!(t_start < t_goal)) throw InvalidArgError("window start must precede goal");
    double sum = 0.0;
    long long count = 0;
    for (const LogRecord& r : log) {
        if (r.t >= t_start && r.t <= t_goal) {
            sum += r.voltage * r.current;
            ++count;
        }
    }
    if (count == 0) {
        throw EmptyWindowError("no log records in [" + std::to_string(t_start) + ", " +
                               std::to_string(t_goal) + "]");
    }
    return (t_goal - t_start) * sum / static_cast<double>(count);
}

void save_path_cost_csv(const PathCost& cost, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write cost csv: " + path);
    char buf[200];
    std::snprintf(buf, sizeof(buf), "# total_time_s = %.9g\n", cost.total_time);
    out << buf;
    std::snprintf(buf, sizeof(buf), "# total_energy_j = %.9g\n", cost.total_energy);
    out << buf;
    std::snprintf(buf, sizeof(buf), "# covered_m = %.9g\n", cost.covered_length);
    out << buf;
    out << "segment,w_hat_w,v_hat_mps,time_s,energy_j\n";
    for (std::size_t k = 0; k < cost.segments.size(); ++k) {
        const SegmentCost& sc = cost.segments[k];
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", k, sc.w, sc.v, sc.time,
                      sc.energy);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace terracost
