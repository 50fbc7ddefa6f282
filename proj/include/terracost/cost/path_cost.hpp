#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "terracost/env/environment.hpp"
#include "terracost/net/model.hpp"
#include "terracost/patch/patch.hpp"
#include "terracost/synth/simulate.hpp"

namespace terracost {

/// Physical (power W, velocity m/s) predictions for a batch of patches.
using PatchPredictor =
    std::function<std::vector<std::pair<double, double>>(const std::vector<Patch>&)>;

/// Wraps a trained model as a PatchPredictor. The model reference must
/// outlive the predictor.
PatchPredictor make_model_predictor(Model<double>& model);

struct SegmentCost {
    double w = 0.0;       // W
    double v = 0.0;       // m/s
    double time = 0.0;    // s
    double energy = 0.0;  // J
};

struct PathCost {
    double total_time = 0.0;
    double total_energy = 0.0;
    double covered_length = 0.0;  // meters actually segmented
    std::vector<SegmentCost> segments;
};

/// Segments the path, predicts each segment and sums time d / v and energy
/// w * d / v. Velocities are floored at 1e-6 m/s before dividing. Throws
/// EmptyPathError when the path yields no full segment; patch extraction
/// failures carry the failing segment index.
PathCost path_cost(const Environment& env, const PatchPredictor& predictor, const Path& path,
                   double d);

/// Ground-truth energy over [t_start, t_goal]: window length times the mean
/// voltage * current of the records inside. EmptyWindowError when no record
/// falls in the window.
double energy_from_log(const TrajectoryLog& log, double t_start, double t_goal);

/// Totals as `# key = value` comments, then one row per segment.
void save_path_cost_csv(const PathCost& cost, const std::string& path);

}  // namespace terracost
