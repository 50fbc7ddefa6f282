#include "terracost/eval/ablation.hpp"

#include "terracost/core/rng.hpp"

namespace terracost {

namespace {

void fill_noise(Grid<float>& plane, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (Eigen::Index i = 0; i < plane.rows(); ++i) {
        for (Eigen::Index j = 0; j < plane.cols(); ++j) {
            plane(i, j) = static_cast<float>(rng.uniform01());
        }
    }
}

}  // namespace

IndexPredictor make_ablation_predictor(Model<double>& model, const Dataset& ds,
                                       const AblationSpec& spec) {
    return [&model, &ds, spec](const std::vector<int>& indices) {
        std::vector<Patch> noisy(indices.size());
        std::vector<const Patch*> ptrs(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            noisy[i] = ds.samples[indices[i]].patch;
            const auto idx = static_cast<std::uint64_t>(indices[i]);
            if (!spec.kept.count(InputLayer::Ortho)) {
                fill_noise(noisy[i].ortho, derive_seed(spec.noise_seed, idx, 0));
            }
            if (!spec.kept.count(InputLayer::Class)) {
                fill_noise(noisy[i].class_plane, derive_seed(spec.noise_seed, idx, 1));
            }
            if (!spec.kept.count(InputLayer::Height)) {
                fill_noise(noisy[i].height, derive_seed(spec.noise_seed, idx, 2));
            }
            ptrs[i] = &noisy[i];
        }
        return model.predict(ptrs);
    };
}

MetricReport ablate_and_evaluate(Model<double>& model, const Dataset& ds, SplitTag split,
                                 const AblationSpec& spec, double d) {
    return evaluate(make_ablation_predictor(model, ds, spec), ds, split, d);
}

}  // namespace terracost
