#pragma once

#include <cstdint>
#include <set>

#include "terracost/eval/metrics.hpp"

namespace terracost {

enum class InputLayer : int { Ortho = 0, Class = 1, Height = 2 };

struct AblationSpec {
    std::set<InputLayer> kept;  // layers passed through; the rest become noise
    std::uint64_t noise_seed = 0;
};

/// Predictor that replaces every non-kept plane with uniform [0,1) noise
/// drawn from a stream seeded by (noise_seed, sample index, layer), so the
/// same sample always gets the same noise.
IndexPredictor make_ablation_predictor(Model<double>& model, const Dataset& ds,
                                       const AblationSpec& spec);

MetricReport ablate_and_evaluate(Model<double>& model, const Dataset& ds, SplitTag split,
                                 const AblationSpec& spec, double d);

}  // namespace terracost
