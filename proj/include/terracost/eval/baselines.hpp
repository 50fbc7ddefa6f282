#pragma once

#include <map>

#include "terracost/eval/metrics.hpp"
#include "terracost/net/train.hpp"

namespace terracost {

/// Dataset restricted to samples of one terrain class, split tags kept and
/// normalizers recomputed from the surviving Train samples.
Dataset filter_dataset_by_class(const Dataset& ds, int class_label);

/// Height-only baseline (a): one single-channel model fitted on the Train
/// samples of train_class, then applied to everything.
TrainResult<double> train_height_only_single(const Dataset& ds, int train_class,
                                             const ModelSpec& base_spec, const TrainConfig& cfg);

/// Height-only baseline (b): one single-channel model per terrain class
/// present in Train.
std::map<int, Model<double>> train_height_only_per_class(const Dataset& ds,
                                                         const ModelSpec& base_spec,
                                                         const TrainConfig& cfg);

/// Routes each sample to the model of its own class. Samples of a class
/// without a model fall back to the first model.
IndexPredictor make_per_class_predictor(std::map<int, Model<double>>& models, const Dataset& ds);

/// Constant expected-velocity timing baseline: T = d / v_e per sample.
/// Only the T column is meaningful; the other variables stay zero.
MetricReport baseline_expected_time(const Dataset& ds, SplitTag split, double d, double v_e);

}  // namespace terracost
