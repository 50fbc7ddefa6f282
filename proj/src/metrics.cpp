#include "terracost/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "terracost/core/errors.hpp"

namespace terracost {

const std::array<const char*, 4> kVariableNames = {"w", "v", "T", "E"};

double ape(double pred, double truth) {
    if (truth == 0.0) throw ZeroTruthError("APE undefined for zero truth");
    return std::abs(pred - truth) / std::abs(truth);
}

IndexPredictor make_model_index_predictor(Model<double>& model, const Dataset& ds) {
    return [&model, &ds](const std::vector<int>& indices) {
        std::vector<const Patch*> patches(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            patches[i] = &ds.samples[indices[i]].patch;
        }
        return model.predict(patches);
    };
}

const GroupMetrics& MetricReport::all() const {
    if (groups.empty()) throw EmptyDatasetError("metric report has no groups");
    return groups.back();
}

const GroupMetrics* MetricReport::group(int class_label) const {
    for (const GroupMetrics& g : groups) {
        if (g.class_label == class_label && g.name != "All") return &g;
    }
    return nullptr;
}

namespace {

constexpr double kMinVelocity = 1e-6;

struct Accumulator {
    long long count = 0;
    long long zero_truth = 0;
    std::array<double, 4> sq_sum{};
    std::array<double, 4> ape_sum{};
    std::array<long long, 4> ape_count{};

    void add(const std::array<double, 4>& truth, const std::array<double, 4>& pred) {
        ++count;
        for (int v = 0; v < 4; ++v) {
            const double err = pred[v] - truth[v];
            sq_sum[v] += err * err;
            if (truth[v] == 0.0) {
                ++zero_truth;
            } else {
                ape_sum[v] += std::abs(err) / std::abs(truth[v]);
                ++ape_count[v];
            }
        }
    }

    GroupMetrics finish(const std::string& name, int label) const {
        GroupMetrics g;
        g.name = name;
        g.class_label = label;
        g.count = count;
        g.zero_truth_skipped = zero_truth;
        for (int v = 0; v < 4; ++v) {
            g.vars[v].rmse = count > 0 ? std::sqrt(sq_sum[v] / static_cast<double>(count)) : 0.0;
            g.vars[v].mape =
                ape_count[v] > 0 ? 100.0 * ape_sum[v] / static_cast<double>(ape_count[v]) : 0.0;
        }
        return g;
    }
};

}  // namespace

MetricReport evaluate(const IndexPredictor& predictor, const Dataset& ds, SplitTag split,
                      double d) {
    if (!(d > 0.0)) throw InvalidArgError("segment length d must be positive");
    const std::vector<int> indices = ds.indices_of(split);
    if (indices.empty()) throw EmptyDatasetError("split has no samples to evaluate");

    std::map<int, Accumulator> per_class;
    Accumulator all;

    constexpr std::size_t kChunk = 32;
    for (std::size_t at = 0; at < indices.size(); at += kChunk) {
        const std::size_t n = std::min(kChunk, indices.size() - at);
        const std::vector<int> chunk(indices.begin() + at, indices.begin() + at + n);
        const auto preds = predictor(chunk);
        if (preds.size() != n) {
            throw ShapeMismatchError("predictor returned " + std::to_string(preds.size()) +
                                     " results for " + std::to_string(n) + " samples");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Sample& s = ds.samples[chunk[i]];
            const double w_hat = preds[i].first;
            const double v_hat = preds[i].second;
            const double v_div = std::max(v_hat, kMinVelocity);
            // Zero-velocity truths would blow up T and E; store zero so the
            // zero-truth MAPE exclusion catches them instead.
            const double t_true = s.v_star > 0.0 ? d / s.v_star : 0.0;
            const std::array<double, 4> truth = {s.w_star, s.v_star, t_true,
                                                 s.w_star * t_true};
            const double t_hat = d / v_div;
            const std::array<double, 4> pred = {w_hat, v_hat, t_hat, w_hat * t_hat};
            per_class[s.class_label].add(truth, pred);
            all.add(truth, pred);
        }
    }

    MetricReport report;
    for (const auto& [label, acc] : per_class) {
        report.groups.push_back(acc.finish("class" + std::to_string(label), label));
    }
    report.groups.push_back(all.finish("All", 0));
    return report;
}

}  // namespace terracost
