#include "terracost/eval/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "terracost/core/errors.hpp"
#include "terracost/core/rng.hpp"

namespace terracost {

Dataset filter_dataset_by_class(const Dataset& ds, int class_label) {
    Dataset out;
    out.s = ds.s;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        if (ds.samples[i].class_label != class_label) continue;
        out.samples.push_back(ds.samples[i]);
        out.tags.push_back(ds.tags[i]);
    }
    if (out.samples.empty()) {
        throw EmptyDatasetError("no samples of class " + std::to_string(class_label));
    }
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        if (out.tags[i] != SplitTag::Train) continue;
        out.max_w = std::max(out.max_w, out.samples[i].w_star);
        out.max_v = std::max(out.max_v, out.samples[i].v_star);
    }
    if (out.count_of(SplitTag::Train) == 0) {
        throw EmptyDatasetError("class " + std::to_string(class_label) + " has no train samples");
    }
    return out;
}

TrainResult<double> train_height_only_single(const Dataset& ds, int train_class,
                                             const ModelSpec& base_spec, const TrainConfig& cfg) {
    ModelSpec spec = base_spec;
    spec.input_channels = 1;
    const Dataset sub = filter_dataset_by_class(ds, train_class);
    return train<double>(sub, spec, cfg);
}

std::map<int, Model<double>> train_height_only_per_class(const Dataset& ds,
                                                         const ModelSpec& base_spec,
                                                         const TrainConfig& cfg) {
    std::set<int> classes;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        if (ds.tags[i] == SplitTag::Train) classes.insert(ds.samples[i].class_label);
    }
    if (classes.empty()) throw EmptyDatasetError("train split is empty");

    std::map<int, Model<double>> models;
    for (int label : classes) {
        TrainConfig class_cfg = cfg;
        class_cfg.seed = derive_seed(cfg.seed, 0x62'61'73'65ULL, static_cast<std::uint64_t>(label));
        models.emplace(label, train_height_only_single(ds, label, base_spec, class_cfg).model);
    }
    return models;
}

IndexPredictor make_per_class_predictor(std::map<int, Model<double>>& models, const Dataset& ds) {
    if (models.empty()) throw InvalidArgError("per-class predictor needs at least one model");
    return [&models, &ds](const std::vector<int>& indices) {
        std::vector<std::pair<double, double>> out(indices.size());
        // Batch per class so each model sees one contiguous prediction call.
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < indices.size(); ++i) {
            by_class[ds.samples[indices[i]].class_label].push_back(i);
        }
        for (const auto& [label, positions] : by_class) {
            auto it = models.find(label);
            if (it == models.end()) it = models.begin();
            std::vector<const Patch*> patches(positions.size());
            for (std::size_t i = 0; i < positions.size(); ++i) {
                patches[i] = &ds.samples[indices[positions[i]]].patch;
            }
            const auto preds = it->second.predict(patches);
            for (std::size_t i = 0; i < positions.size(); ++i) out[positions[i]] = preds[i];
        }
        return out;
    };
}

MetricReport baseline_expected_time(const Dataset& ds, SplitTag split, double d, double v_e) {
    if (!(v_e > 0.0)) throw InvalidArgError("expected velocity must be positive");
    if (!(d > 0.0)) throw InvalidArgError("segment length d must be positive");
    const std::vector<int> indices = ds.indices_of(split);
    if (indices.empty()) throw EmptyDatasetError("split has no samples to evaluate");

    struct Acc {
        long long count = 0;
        long long zero = 0;
        double sq = 0.0;
        double ape_sum = 0.0;
        long long ape_n = 0;
    };
    std::map<int, Acc> per_class;
    const double t_hat = d / v_e;

    const auto add = [&](Acc& acc, double t_true) {
        ++acc.count;
        const double err = t_hat - t_true;
        acc.sq += err * err;
        if (t_true == 0.0) {
            ++acc.zero;
        } else {
            acc.ape_sum += std::abs(err) / t_true;
            ++acc.ape_n;
        }
    };

    Acc all;
    for (int idx : indices) {
        const Sample& s = ds.samples[idx];
        const double t_true = s.v_star > 0.0 ? d / s.v_star : 0.0;
        add(per_class[s.class_label], t_true);
        add(all, t_true);
    }

    const auto finish = [](const Acc& acc, const std::string& name, int label) {
        GroupMetrics g;
        g.name = name;
        g.class_label = label;
        g.count = acc.count;
        g.zero_truth_skipped = acc.zero;
        g.vars[static_cast<int>(Variable::Time)].rmse =
            acc.count > 0 ? std::sqrt(acc.sq / static_cast<double>(acc.count)) : 0.0;
        g.vars[static_cast<int>(Variable::Time)].mape =
            acc.ape_n > 0 ? 100.0 * acc.ape_sum / static_cast<double>(acc.ape_n) : 0.0;
        return g;
    };

    MetricReport report;
    for (const auto& [label, acc] : per_class) {
        report.groups.push_back(finish(acc, "class" + std::to_string(label), label));
    }
    report.groups.push_back(finish(all, "All", 0));
    return report;
}

}  // namespace terracost
