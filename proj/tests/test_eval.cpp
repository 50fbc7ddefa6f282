#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "helpers.hpp"
#include "terracost/eval/ablation.hpp"
#include "terracost/eval/baselines.hpp"
#include "terracost/eval/metrics.hpp"

using namespace terracost;

namespace {

Sample make_sample(SplitMix64& rng, int class_label, double w, double v, int s = 8) {
    Sample sample;
    sample.patch = tctest::random_patch(s, rng);
    sample.w_star = w;
    sample.v_star = v;
    sample.class_label = class_label;
    return sample;
}

Dataset two_sample_dataset() {
    SplitMix64 rng(51);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    ds.samples.push_back(make_sample(rng, 7, 100.0, 0.5));
    ds.samples.push_back(make_sample(rng, 7, 50.0, 1.0));
    ds.tags = {SplitTag::Test, SplitTag::Test};
    return ds;
}

IndexPredictor table_predictor(std::map<int, std::pair<double, double>> table) {
    return [table](const std::vector<int>& indices) {
        std::vector<std::pair<double, double>> out;
        for (int i : indices) out.push_back(table.at(i));
        return out;
    };
}

IndexPredictor oracle_predictor(const Dataset& ds) {
    return [&ds](const std::vector<int>& indices) {
        std::vector<std::pair<double, double>> out;
        for (int i : indices) out.emplace_back(ds.samples[i].w_star, ds.samples[i].v_star);
        return out;
    };
}

ModelSpec tiny_spec() {
    ModelSpec spec;
    spec.input_side = 8;
    spec.input_channels = 3;
    spec.stem_channels = 4;
    spec.stage_channels = {4};
    spec.stage_strides = {1};
    spec.blocks_per_stage = {1};
    return spec;
}

bool same_report(const MetricReport& a, const MetricReport& b) {
    if (a.groups.size() != b.groups.size()) return false;
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
        if (a.groups[g].name != b.groups[g].name) return false;
        if (a.groups[g].count != b.groups[g].count) return false;
        for (int v = 0; v < 4; ++v) {
            if (a.groups[g].vars[v].rmse != b.groups[g].vars[v].rmse) return false;
            if (a.groups[g].vars[v].mape != b.groups[g].vars[v].mape) return false;
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("absolute percentage error") {
    CHECK(ape(110.0, 100.0) == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(ape(90.0, 100.0) == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(ape(-3.0, -2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(ape(1.0, 0.0), ZeroTruthError);
}

TEST_CASE("evaluation arithmetic on two hand samples") {
    const Dataset ds = two_sample_dataset();
    const auto pred = table_predictor({{0, {110.0, 0.5}}, {1, {55.0, 0.8}}});
    const MetricReport report = evaluate(pred, ds, SplitTag::Test, 1.0);

    REQUIRE(report.groups.size() == 2);
    const GroupMetrics& all = report.all();
    CHECK(all.name == "All");
    CHECK(all.count == 2);
    CHECK(all.zero_truth_skipped == 0);

    // w errors 10 and 5; v errors 0 and -0.2
    CHECK(all.vars[0].rmse == doctest::Approx(std::sqrt(62.5)).epsilon(1e-12));
    CHECK(all.vars[0].mape == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(all.vars[1].rmse == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
    CHECK(all.vars[1].mape == doctest::Approx(10.0).epsilon(1e-12));
    // T truths 2 and 1, preds 2 and 1.25
    CHECK(all.vars[2].rmse == doctest::Approx(std::sqrt(0.03125)).epsilon(1e-12));
    CHECK(all.vars[2].mape == doctest::Approx(12.5).epsilon(1e-12));
    // E truths 200 and 50, preds 220 and 68.75
    CHECK(all.vars[3].rmse == doctest::Approx(std::sqrt(375.78125)).epsilon(1e-12));
    CHECK(all.vars[3].mape == doctest::Approx(23.75).epsilon(1e-12));

    const GroupMetrics* c7 = report.group(7);
    REQUIRE(c7 != nullptr);
    CHECK(c7->name == "class7");
    CHECK(c7->vars[3].mape == all.vars[3].mape);
    CHECK(report.group(3) == nullptr);
}

TEST_CASE("perfect predictions score zero everywhere") {
    SplitMix64 rng(53);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    for (int k = 0; k < 7; ++k) {
        ds.samples.push_back(
            make_sample(rng, 4 + k % 3, rng.uniform(20.0, 90.0), rng.uniform(0.2, 1.0)));
        ds.tags.push_back(SplitTag::Val);
    }
    const MetricReport report = evaluate(oracle_predictor(ds), ds, SplitTag::Val, 1.0);
    for (const GroupMetrics& g : report.groups) {
        for (int v = 0; v < 4; ++v) {
            CHECK(g.vars[v].rmse == 0.0);
            CHECK(g.vars[v].mape == 0.0);
        }
    }
}

TEST_CASE("sample order does not change the report") {
    SplitMix64 rng(57);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    std::map<int, std::pair<double, double>> table;
    for (int k = 0; k < 5; ++k) {
        ds.samples.push_back(
            make_sample(rng, 4 + k % 2, rng.uniform(20.0, 90.0), rng.uniform(0.2, 1.0)));
        ds.tags.push_back(SplitTag::Test);
        table[k] = {rng.uniform(20.0, 90.0), rng.uniform(0.2, 1.0)};
    }

    Dataset reversed = ds;
    std::reverse(reversed.samples.begin(), reversed.samples.end());
    std::map<int, std::pair<double, double>> rev_table;
    for (int k = 0; k < 5; ++k) rev_table[k] = table[4 - k];

    const MetricReport a = evaluate(table_predictor(table), ds, SplitTag::Test, 1.0);
    const MetricReport b = evaluate(table_predictor(rev_table), reversed, SplitTag::Test, 1.0);
    REQUIRE(a.groups.size() == b.groups.size());
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
        CHECK(a.groups[g].name == b.groups[g].name);
        for (int v = 0; v < 4; ++v) {
            CHECK(a.groups[g].vars[v].rmse ==
                  doctest::Approx(b.groups[g].vars[v].rmse).epsilon(1e-12));
            CHECK(a.groups[g].vars[v].mape ==
                  doctest::Approx(b.groups[g].vars[v].mape).epsilon(1e-12));
        }
    }
}

TEST_CASE("per-class groups recombine into the overall group") {
    SplitMix64 rng(59);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    std::map<int, std::pair<double, double>> table;
    for (int k = 0; k < 5; ++k) {
        ds.samples.push_back(
            make_sample(rng, k < 3 ? 4 : 5, rng.uniform(20.0, 90.0), rng.uniform(0.2, 1.0)));
        ds.tags.push_back(SplitTag::Test);
        table[k] = {rng.uniform(20.0, 90.0), rng.uniform(0.2, 1.0)};
    }
    const MetricReport report = evaluate(table_predictor(table), ds, SplitTag::Test, 1.0);
    const GroupMetrics* c4 = report.group(4);
    const GroupMetrics* c5 = report.group(5);
    REQUIRE(c4 != nullptr);
    REQUIRE(c5 != nullptr);
    CHECK(c4->count == 3);
    CHECK(c5->count == 2);
    const GroupMetrics& all = report.all();
    for (int v = 0; v < 4; ++v) {
        const double recombined_sq =
            c4->vars[v].rmse * c4->vars[v].rmse * 3 + c5->vars[v].rmse * c5->vars[v].rmse * 2;
        CHECK(all.vars[v].rmse * all.vars[v].rmse * 5 ==
              doctest::Approx(recombined_sq).epsilon(1e-12));
        const double recombined_ape = c4->vars[v].mape * 3 + c5->vars[v].mape * 2;
        CHECK(all.vars[v].mape * 5 == doctest::Approx(recombined_ape).epsilon(1e-12));
    }
}

TEST_CASE("zero-velocity truths are excluded from percentage errors") {
    SplitMix64 rng(61);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    ds.samples.push_back(make_sample(rng, 7, 100.0, 0.5));
    ds.samples.push_back(make_sample(rng, 7, 80.0, 0.0));
    ds.tags = {SplitTag::Test, SplitTag::Test};

    const auto pred = table_predictor({{0, {100.0, 0.5}}, {1, {80.0, 0.5}}});
    const MetricReport report = evaluate(pred, ds, SplitTag::Test, 1.0);
    const GroupMetrics& all = report.all();
    CHECK(all.count == 2);
    CHECK(all.zero_truth_skipped == 3);  // v, T and E of the stalled sample
    CHECK(all.vars[1].mape == 0.0);      // the valid sample is exact
    CHECK(all.vars[1].rmse == doctest::Approx(std::sqrt(0.125)).epsilon(1e-12));
    for (int v = 0; v < 4; ++v) CHECK(std::isfinite(all.vars[v].mape));
}

TEST_CASE("evaluation input validation") {
    const Dataset ds = two_sample_dataset();
    const auto pred = oracle_predictor(ds);
    CHECK_THROWS_AS(evaluate(pred, ds, SplitTag::Test, 0.0), InvalidArgError);
    CHECK_THROWS_AS(evaluate(pred, ds, SplitTag::Train, 1.0), EmptyDatasetError);
    const IndexPredictor broken = [](const std::vector<int>&) {
        return std::vector<std::pair<double, double>>{};
    };
    CHECK_THROWS_AS(evaluate(broken, ds, SplitTag::Test, 1.0), ShapeMismatchError);
}

TEST_CASE("keeping every layer reproduces the plain evaluation") {
    SplitMix64 rng(63);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    for (int k = 0; k < 10; ++k) {
        ds.samples.push_back(
            make_sample(rng, 4 + k % 2, rng.uniform(20.0, 90.0), rng.uniform(0.2, 1.0)));
        ds.tags.push_back(k < 6 ? SplitTag::Train : SplitTag::Test);
    }
    Model<double> model(tiny_spec(), 100.0, 1.0);
    model.init_weights(9);

    AblationSpec full;
    full.kept = {InputLayer::Ortho, InputLayer::Class, InputLayer::Height};
    const MetricReport direct =
        evaluate(make_model_index_predictor(model, ds), ds, SplitTag::Test, 1.0);
    const MetricReport kept_all = ablate_and_evaluate(model, ds, SplitTag::Test, full, 1.0);
    CHECK(same_report(direct, kept_all));

    AblationSpec none;
    none.noise_seed = 1;
    const MetricReport noise = ablate_and_evaluate(model, ds, SplitTag::Test, none, 1.0);
    CHECK_FALSE(same_report(direct, noise));
    const MetricReport noise_again = ablate_and_evaluate(model, ds, SplitTag::Test, none, 1.0);
    CHECK(same_report(noise, noise_again));

    AblationSpec height_only;
    height_only.kept = {InputLayer::Height};
    height_only.noise_seed = 1;
    const MetricReport partial =
        ablate_and_evaluate(model, ds, SplitTag::Test, height_only, 1.0);
    CHECK_FALSE(same_report(partial, noise));
}

TEST_CASE("class filter keeps tags and recomputes normalizers") {
    SplitMix64 rng(67);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    ds.samples.push_back(make_sample(rng, 4, 70.0, 0.6));
    ds.samples.push_back(make_sample(rng, 4, 55.0, 0.8));
    ds.samples.push_back(make_sample(rng, 5, 100.0, 1.0));
    ds.samples.push_back(make_sample(rng, 4, 90.0, 0.9));
    ds.tags = {SplitTag::Train, SplitTag::Train, SplitTag::Train, SplitTag::Test};

    const Dataset only4 = filter_dataset_by_class(ds, 4);
    REQUIRE(only4.samples.size() == 3);
    CHECK(only4.count_of(SplitTag::Train) == 2);
    CHECK(only4.count_of(SplitTag::Test) == 1);
    CHECK(only4.max_w == 70.0);  // test-split 90 W must not leak in
    CHECK(only4.max_v == 0.8);
    for (const Sample& s : only4.samples) CHECK(s.class_label == 4);

    CHECK_THROWS_AS(filter_dataset_by_class(ds, 6), EmptyDatasetError);

    Dataset test_only = ds;
    test_only.tags = {SplitTag::Test, SplitTag::Test, SplitTag::Train, SplitTag::Test};
    CHECK_THROWS_AS(filter_dataset_by_class(test_only, 4), EmptyDatasetError);
}

TEST_CASE("height-only baselines train single-channel models") {
    SplitMix64 rng(71);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    for (int k = 0; k < 16; ++k) {
        ds.samples.push_back(
            make_sample(rng, 4 + k % 2, rng.uniform(20.0, 90.0), rng.uniform(0.2, 1.0)));
        ds.tags.push_back(k < 12 ? SplitTag::Train : SplitTag::Test);
    }
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 4;
    cfg.seed = 3;

    TrainResult<double> single = train_height_only_single(ds, 4, tiny_spec(), cfg);
    CHECK(single.model.spec.input_channels == 1);
    const MetricReport applied =
        evaluate(make_model_index_predictor(single.model, ds), ds, SplitTag::Test, 1.0);
    CHECK(applied.all().count == 4);
    CHECK(std::isfinite(applied.all().vars[3].mape));

    std::map<int, Model<double>> per_class = train_height_only_per_class(ds, tiny_spec(), cfg);
    REQUIRE(per_class.size() == 2);
    CHECK(per_class.count(4) == 1);
    CHECK(per_class.count(5) == 1);

    CHECK_THROWS_AS(train_height_only_single(ds, 6, tiny_spec(), cfg), EmptyDatasetError);
}

TEST_CASE("per-class predictor routes by sample class with fallback") {
    SplitMix64 rng(73);
    Dataset ds;
    ds.s = 8;
    ds.max_w = 100.0;
    ds.max_v = 1.0;
    ds.samples.push_back(make_sample(rng, 4, 50.0, 0.5));
    ds.samples.push_back(make_sample(rng, 5, 60.0, 0.6));
    ds.samples.push_back(make_sample(rng, 6, 70.0, 0.7));  // no model for class 6
    ds.tags = {SplitTag::Test, SplitTag::Test, SplitTag::Test};

    std::map<int, Model<double>> models;
    ModelSpec spec = tiny_spec();
    spec.input_channels = 1;
    models.emplace(4, Model<double>(spec, 100.0, 1.0)).first->second.init_weights(1);
    models.emplace(5, Model<double>(spec, 100.0, 1.0)).first->second.init_weights(2);

    const IndexPredictor routed = make_per_class_predictor(models, ds);
    const auto got = routed({0, 1, 2});
    REQUIRE(got.size() == 3);

    const auto direct4 = models.at(4).predict({&ds.samples[0].patch});
    const auto direct5 = models.at(5).predict({&ds.samples[1].patch});
    const auto fallback = models.at(4).predict({&ds.samples[2].patch});
    CHECK(got[0] == direct4[0]);
    CHECK(got[1] == direct5[0]);
    CHECK(got[2] == fallback[0]);

    std::map<int, Model<double>> empty;
    CHECK_THROWS_AS(make_per_class_predictor(empty, ds), InvalidArgError);
}

TEST_CASE("expected-time baseline fills only the time column") {
    const Dataset ds = two_sample_dataset();
    const MetricReport report = baseline_expected_time(ds, SplitTag::Test, 1.0, 0.8);
    const GroupMetrics& all = report.all();
    CHECK(all.count == 2);
    // t_hat 1.25 against truths 2 and 1
    CHECK(all.vars[2].rmse == doctest::Approx(std::sqrt(0.3125)).epsilon(1e-12));
    CHECK(all.vars[2].mape == doctest::Approx(31.25).epsilon(1e-12));
    CHECK(all.vars[0].rmse == 0.0);
    CHECK(all.vars[1].rmse == 0.0);
    CHECK(all.vars[3].rmse == 0.0);

    CHECK_THROWS_AS(baseline_expected_time(ds, SplitTag::Test, 1.0, 0.0), InvalidArgError);
    CHECK_THROWS_AS(baseline_expected_time(ds, SplitTag::Test, 0.0, 0.8), InvalidArgError);
    CHECK_THROWS_AS(baseline_expected_time(ds, SplitTag::Val, 1.0, 0.8), EmptyDatasetError);
}

}  // TEST_SUITE
