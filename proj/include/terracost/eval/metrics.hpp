#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "terracost/net/model.hpp"
#include "terracost/patch/dataset.hpp"

namespace terracost {

/// Absolute percentage error as a fraction: |pred - truth| / |truth|.
/// ZeroTruthError when truth is 0.
double ape(double pred, double truth);

/// Batched physical (w, v) predictions for dataset samples addressed by
/// index, so noise injection and per-class routing can key off the sample.
using IndexPredictor =
    std::function<std::vector<std::pair<double, double>>(const std::vector<int>&)>;

IndexPredictor make_model_index_predictor(Model<double>& model, const Dataset& ds);

enum class Variable : int { Power = 0, Velocity = 1, Time = 2, Energy = 3 };

extern const std::array<const char*, 4> kVariableNames;  // "w", "v", "T", "E"

struct VariableMetrics {
    double rmse = 0.0;
    double mape = 0.0;  // percent
};

struct GroupMetrics {
    std::string name;  // "class<k>" or "All"
    int class_label = 0;  // 0 for All
    long long count = 0;
    long long zero_truth_skipped = 0;  // sample-variables excluded from MAPE
    std::array<VariableMetrics, 4> vars;
};

/// Per-terrain groups in ascending class order, then the "All" group last.
struct MetricReport {
    std::vector<GroupMetrics> groups;

    const GroupMetrics& all() const;
    const GroupMetrics* group(int class_label) const;
};

/// RMSE and MAPE of power, velocity, segment time d / v and segment energy
/// w * d / v over one split, grouped by the samples' terrain class plus an
/// overall group. Predicted velocity is floored at 1e-6 m/s before
/// dividing; zero-truth sample-variables are skipped in MAPE and counted.
MetricReport evaluate(const IndexPredictor& predictor, const Dataset& ds, SplitTag split,
                      double d);

}  // namespace terracost
