#pragma once

#include <string>
#include <vector>

#include "terracost/eval/metrics.hpp"

namespace terracost {

/// `group,variable,rmse,mape,count` rows, groups in report order.
void save_metric_report_csv(const MetricReport& report, const std::string& path);

struct SeriesPoint {
    int patch_no = 0;  // 1-based position after grouping
    int class_label = 0;
    double truth = 0.0;
    double pred = 0.0;
    double ape = 0.0;  // fraction; NaN when the truth is zero
};

/// Per-sample truth/prediction series for one variable, ordered by terrain
/// class then dataset order. max_points > 0 subsamples evenly.
std::vector<SeriesPoint> make_series(const IndexPredictor& predictor, const Dataset& ds,
                                     SplitTag split, double d, Variable variable,
                                     int max_points);

/// `patch_no,terrain,truth,pred,ape` rows.
void save_series_csv(const std::vector<SeriesPoint>& series, const std::string& path);
std::vector<SeriesPoint> load_series_csv(const std::string& path);

/// Self-contained SVG: truth and prediction curves over patch number with
/// terrain bands, and an absolute-percentage-error panel below.
void render_series_svg(const std::vector<SeriesPoint>& series, const std::string& title,
                       const std::string& unit, const std::string& path);

}  // namespace terracost
