#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "terracost/core/manifest.hpp"
#include "terracost/core/rng.hpp"
#include "terracost/core/version.hpp"
#include "terracost/cost/cost_grid.hpp"
#include "terracost/cost/path_cost.hpp"
#include "terracost/env/environment.hpp"
#include "terracost/eval/ablation.hpp"
#include "terracost/eval/baselines.hpp"
#include "terracost/eval/report.hpp"
#include "terracost/net/train.hpp"
#include "terracost/patch/dataset.hpp"
#include "terracost/synth/generate.hpp"
#include "terracost/synth/simulate.hpp"
#include "terracost/synth/tours.hpp"

namespace fs = std::filesystem;
namespace tc = terracost;

namespace {

std::uint64_t default_seed() {
    const char* s = std::getenv("TERRACOST_SEED");
    if (s == nullptr || *s == '\0') return 0;
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw tc::InvalidArgError("TERRACOST_SEED is not an unsigned integer: " +
                                  std::string(s));
    }
}

tc::OracleConfig oracle_or_defaults(const std::string& path) {
    tc::OracleConfig cfg = path.empty() ? tc::OracleConfig::defaults() : tc::load_oracle_config(path);
    cfg.validate();
    return cfg;
}

const std::vector<std::string> kEnvFiles = {"ortho.tcrs", "height.tcrs", "class.tcrs", "env.cfg"};

void manifest_env_inputs(tc::KeyValueConfig& kv, const std::string& env_dir) {
    for (const std::string& f : kEnvFiles) tc::manifest_add_file(kv, "in", env_dir + "/" + f);
}

tc::SplitTag parse_split(const std::string& s) {
    if (s == "train") return tc::SplitTag::Train;
    if (s == "test") return tc::SplitTag::Test;
    if (s == "val") return tc::SplitTag::Val;
    throw tc::InvalidArgError("unknown split: " + s);
}

tc::Variable parse_variable(const std::string& s) {
    if (s == "w") return tc::Variable::Power;
    if (s == "v") return tc::Variable::Velocity;
    if (s == "T") return tc::Variable::Time;
    if (s == "E") return tc::Variable::Energy;
    throw tc::InvalidArgError("unknown variable: " + s + " (expected w, v, T or E)");
}

std::vector<std::string> list_log_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("log_", 0) == 0 && name.size() > 8 &&
            name.compare(name.size() - 4, 4, ".csv") == 0) {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw tc::IoError("no log_*.csv files in " + dir);
    return files;
}

void append_report_rows(std::ofstream& out, const std::string& tag,
                        const tc::MetricReport& report) {
    char buf[200];
    for (const tc::GroupMetrics& g : report.groups) {
        for (int v = 0; v < 4; ++v) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.9g,%.9g,%lld\n", tag.c_str(),
                          g.name.c_str(), tc::kVariableNames[v], g.vars[v].rmse, g.vars[v].mape,
                          g.count);
            out << buf;
        }
    }
}

void print_all_row(const std::string& tag, const tc::MetricReport& report) {
    const tc::GroupMetrics& a = report.all();
    std::printf("%-14s w rmse %8.3f W  mape %6.2f%%   v rmse %7.4f m/s  mape %6.2f%%\n",
                tag.c_str(), a.vars[0].rmse, a.vars[0].mape, a.vars[1].rmse, a.vars[1].mape);
}

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string manifest;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "base seed (default: TERRACOST_SEED or 0)");
    cmd->add_option("--manifest", c.manifest, "write a run manifest to this path");
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"terrain-aware energy and time costing for ground robots"};
    app.set_version_flag("--version", std::string("terracost ") + tc::kVersion);
    app.require_subcommand(1);
    const std::uint64_t seed0 = default_seed();

    // gen-env
    auto* c_gen = app.add_subcommand("gen-env", "generate a synthetic environment");
    struct {
        std::string out, oracle;
        tc::GenerateParams p;
        CommonOpts c;
    } gen;
    gen.c.seed = seed0;
    c_gen->add_option("--out", gen.out, "output directory")->required();
    c_gen->add_option("--oracle", gen.oracle, "oracle config file (defaults when absent)");
    c_gen->add_option("--width", gen.p.width_m, "extent west-east, m");
    c_gen->add_option("--height", gen.p.height_m, "extent south-north, m");
    c_gen->add_option("--res", gen.p.resolution, "cell size, m");
    c_gen->add_option("--classes", gen.p.num_classes, "number of terrain classes");
    c_gen->add_option("--roughness", gen.p.roughness, "relief roughness, 0 = flat");
    c_gen->add_option("--max-slope", gen.p.max_slope_deg, "steepest slope, degrees");
    c_gen->add_option("--border", gen.p.border_m, "no-data frame width, m");
    c_gen->add_option("--regions", gen.p.num_regions, "terrain regions, 0 = auto");
    add_common(c_gen, gen.c);
    c_gen->callback([&] {
        gen.p.seed = gen.c.seed;
        const tc::OracleConfig oracle = oracle_or_defaults(gen.oracle);
        const tc::Environment env = tc::generate_environment(gen.p, oracle);
        fs::create_directories(gen.out);
        tc::save_environment(env, gen.out);
        std::printf("environment %dx%d cells at %g m, %d classes -> %s\n", env.width(),
                    env.height_cells(), env.geo().resolution, env.num_classes, gen.out.c_str());
        if (!gen.c.manifest.empty()) {
            auto kv = tc::make_manifest("gen-env", static_cast<long long>(gen.c.seed));
            kv.set("arg.width", gen.p.width_m);
            kv.set("arg.height", gen.p.height_m);
            kv.set("arg.res", gen.p.resolution);
            kv.set("arg.classes", static_cast<long long>(gen.p.num_classes));
            kv.set("arg.roughness", gen.p.roughness);
            kv.set("arg.max_slope", gen.p.max_slope_deg);
            kv.set("arg.border", gen.p.border_m);
            kv.set("arg.regions", static_cast<long long>(gen.p.num_regions));
            if (!gen.oracle.empty()) tc::manifest_add_file(kv, "in", gen.oracle);
            for (const std::string& f : kEnvFiles) {
                tc::manifest_add_file(kv, "out", gen.out + "/" + f);
            }
            kv.save(gen.c.manifest);
        }
    });

    // record
    auto* c_rec = app.add_subcommand("record", "drive coverage tours and log telemetry");
    struct {
        std::string env, out, oracle;
        double spacing = 1.0, margin = 2.5;
        bool no_diagonals = false;
        CommonOpts c;
    } rec;
    rec.c.seed = seed0;
    c_rec->add_option("--env", rec.env, "environment directory")->required();
    c_rec->add_option("--out", rec.out, "output directory for tours and logs")->required();
    c_rec->add_option("--oracle", rec.oracle, "oracle config file (defaults when absent)");
    c_rec->add_option("--spacing", rec.spacing, "sweep line spacing, m");
    c_rec->add_option("--margin", rec.margin, "keep-out from the raster edge, m");
    c_rec->add_flag("--no-diagonals", rec.no_diagonals, "skip the 45-degree sweeps");
    add_common(c_rec, rec.c);
    c_rec->callback([&] {
        const tc::Environment env = tc::load_environment(rec.env);
        const tc::OracleConfig oracle = oracle_or_defaults(rec.oracle);
        tc::TourParams tp;
        tp.spacing = rec.spacing;
        tp.margin = rec.margin;
        tp.diagonals = !rec.no_diagonals;
        tp.seed = rec.c.seed;
        const std::vector<tc::Path> tours = tc::make_coverage_tours(env, tp);
        fs::create_directories(rec.out);
        long long records = 0;
        std::vector<std::string> outputs;
        for (std::size_t i = 0; i < tours.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "tour_%03zu.csv", i);
            tc::save_path_csv(tours[i], rec.out + "/" + name);
            outputs.emplace_back(name);
            tc::OracleConfig run = oracle;
            run.seed = tc::derive_seed(rec.c.seed, 0x72756e, i);
            const tc::TrajectoryLog log = tc::simulate_run(env, run, tours[i]);
            records += static_cast<long long>(log.size());
            std::snprintf(name, sizeof(name), "log_%03zu.csv", i);
            tc::save_log_csv(log, rec.out + "/" + name);
            outputs.emplace_back(name);
        }
        std::printf("%zu tours, %lld records -> %s\n", tours.size(), records, rec.out.c_str());
        if (!rec.c.manifest.empty()) {
            auto kv = tc::make_manifest("record", static_cast<long long>(rec.c.seed));
            kv.set("arg.spacing", rec.spacing);
            kv.set("arg.margin", rec.margin);
            kv.set("arg.diagonals", static_cast<long long>(tp.diagonals ? 1 : 0));
            manifest_env_inputs(kv, rec.env);
            if (!rec.oracle.empty()) tc::manifest_add_file(kv, "in", rec.oracle);
            for (const std::string& f : outputs) tc::manifest_add_file(kv, "out", rec.out + "/" + f);
            kv.save(rec.c.manifest);
        }
    });

    // build-dataset
    auto* c_ds = app.add_subcommand("build-dataset", "segment logs into a patch dataset");
    struct {
        std::string env, logs, out;
        tc::DatasetBuildParams p;
        std::vector<double> val_rect;
        CommonOpts c;
    } bds;
    bds.c.seed = seed0;
    c_ds->add_option("--env", bds.env, "environment directory")->required();
    c_ds->add_option("--logs", bds.logs, "directory holding log_*.csv")->required();
    c_ds->add_option("--out", bds.out, "output dataset file")->required();
    c_ds->add_option("--d", bds.p.d, "segment length, m");
    c_ds->add_option("--train-frac", bds.p.train_fraction, "train fraction of non-val samples");
    c_ds->add_option("--min-records", bds.p.min_records, "minimum log records per segment");
    c_ds->add_option("--val-rect", bds.val_rect, "x0 y0 x1 y1 world rect routed to Val")
        ->expected(4);
    add_common(c_ds, bds.c);
    c_ds->callback([&] {
        const tc::Environment env = tc::load_environment(bds.env);
        const std::vector<std::string> files = list_log_files(bds.logs);
        std::vector<tc::TrajectoryLog> logs;
        logs.reserve(files.size());
        for (const std::string& f : files) logs.push_back(tc::load_log_csv(f));
        bds.p.test_fraction = 1.0 - bds.p.train_fraction;
        bds.p.seed = bds.c.seed;
        if (!bds.val_rect.empty()) {
            bds.p.val_region =
                tc::WorldRect{bds.val_rect[0], bds.val_rect[1], bds.val_rect[2], bds.val_rect[3]};
        }
        const tc::Dataset ds = tc::build_dataset(env, logs, bds.p);
        tc::save_dataset(ds, bds.out);
        std::printf(
            "%zu samples (train %lld, test %lld, val %lld), %lld skipped, max_w %.3f max_v "
            "%.3f -> %s\n",
            ds.samples.size(), ds.count_of(tc::SplitTag::Train), ds.count_of(tc::SplitTag::Test),
            ds.count_of(tc::SplitTag::Val), ds.skipped, ds.max_w, ds.max_v, bds.out.c_str());
        if (!bds.c.manifest.empty()) {
            auto kv = tc::make_manifest("build-dataset", static_cast<long long>(bds.c.seed));
            kv.set("arg.d", bds.p.d);
            kv.set("arg.train_frac", bds.p.train_fraction);
            kv.set("arg.min_records", static_cast<long long>(bds.p.min_records));
            if (bds.p.val_region) {
                kv.set("arg.val_rect", std::to_string(bds.val_rect[0]) + " " +
                                           std::to_string(bds.val_rect[1]) + " " +
                                           std::to_string(bds.val_rect[2]) + " " +
                                           std::to_string(bds.val_rect[3]));
            }
            manifest_env_inputs(kv, bds.env);
            for (const std::string& f : files) tc::manifest_add_file(kv, "in", f);
            tc::manifest_add_file(kv, "out", bds.out);
            kv.save(bds.c.manifest);
        }
    });

    // train
    auto* c_tr = app.add_subcommand("train", "fit the residual network on a dataset");
    struct {
        std::string dataset, out, curve, optimizer = "adam";
        tc::TrainConfig cfg;
        int threads = 1;
        CommonOpts c;
    } tr;
    tr.c.seed = seed0;
    c_tr->add_option("--dataset", tr.dataset, "dataset file")->required();
    c_tr->add_option("--out", tr.out, "output model file")->required();
    c_tr->add_option("--epochs", tr.cfg.epochs, "training epochs");
    c_tr->add_option("--batch", tr.cfg.batch_size, "batch size");
    c_tr->add_option("--lr", tr.cfg.lr, "learning rate");
    c_tr->add_option("--optimizer", tr.optimizer, "adam or sgd")
        ->check(CLI::IsMember({"adam", "sgd"}));
    c_tr->add_option("--momentum", tr.cfg.momentum, "sgd momentum");
    c_tr->add_option("--curve", tr.curve, "write per-epoch losses to this csv");
    c_tr->add_option("--threads", tr.threads, "worker threads (runs are sequential)")
        ->check(CLI::PositiveNumber);
    c_tr->add_flag("--verbose", tr.cfg.verbose, "print per-epoch losses");
    add_common(c_tr, tr.c);
    c_tr->callback([&] {
        const tc::Dataset ds = tc::load_dataset(tr.dataset);
        tc::ModelSpec spec;
        spec.input_side = ds.s;
        tr.cfg.seed = tr.c.seed;
        tr.cfg.optimizer =
            tr.optimizer == "sgd" ? tc::OptimizerKind::Sgd : tc::OptimizerKind::Adam;
        tc::TrainResult<double> result = tc::train<double>(ds, spec, tr.cfg);
        tc::save_model(result.model, tr.out);
        if (!tr.curve.empty()) {
            std::ofstream out(tr.curve, std::ios::binary);
            if (!out) throw tc::IoError("cannot write curve csv: " + tr.curve);
            out << "epoch,train_loss,test_loss\n";
            char buf[96];
            for (std::size_t e = 0; e < result.history.size(); ++e) {
                std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", e + 1,
                              result.history[e].train_loss, result.history[e].test_loss);
                out << buf;
            }
        }
        const tc::EpochStats last = result.history.back();
        std::printf("%lld weights, %d epochs, final train %.6f test %.6f -> %s\n",
                    result.model.weight_count(), tr.cfg.epochs, last.train_loss, last.test_loss,
                    tr.out.c_str());
        if (!tr.c.manifest.empty()) {
            auto kv = tc::make_manifest("train", static_cast<long long>(tr.c.seed));
            kv.set("arg.epochs", static_cast<long long>(tr.cfg.epochs));
            kv.set("arg.batch", static_cast<long long>(tr.cfg.batch_size));
            kv.set("arg.lr", tr.cfg.lr);
            kv.set("arg.optimizer", tr.optimizer);
            kv.set("arg.threads", static_cast<long long>(tr.threads));
            tc::manifest_add_file(kv, "in", tr.dataset);
            tc::manifest_add_file(kv, "out", tr.out);
            if (!tr.curve.empty()) tc::manifest_add_file(kv, "out", tr.curve);
            kv.save(tr.c.manifest);
        }
    });

    // eval
    auto* c_ev = app.add_subcommand("eval", "score a model on one dataset split");
    struct {
        std::string dataset, model, split = "test", out;
        double d = 1.0;
        CommonOpts c;
    } ev;
    ev.c.seed = seed0;
    c_ev->add_option("--dataset", ev.dataset, "dataset file")->required();
    c_ev->add_option("--model", ev.model, "model file")->required();
    c_ev->add_option("--split", ev.split, "train, test or val")
        ->check(CLI::IsMember({"train", "test", "val"}));
    c_ev->add_option("--d", ev.d, "segment length, m");
    c_ev->add_option("--out", ev.out, "output metrics csv")->required();
    add_common(c_ev, ev.c);
    c_ev->callback([&] {
        const tc::Dataset ds = tc::load_dataset(ev.dataset);
        tc::Model<double> model = tc::load_model<double>(ev.model);
        const tc::IndexPredictor pred = tc::make_model_index_predictor(model, ds);
        const tc::MetricReport report = tc::evaluate(pred, ds, parse_split(ev.split), ev.d);
        tc::save_metric_report_csv(report, ev.out);
        print_all_row(ev.split, report);
        if (!ev.c.manifest.empty()) {
            auto kv = tc::make_manifest("eval", static_cast<long long>(ev.c.seed));
            kv.set("arg.split", ev.split);
            kv.set("arg.d", ev.d);
            tc::manifest_add_file(kv, "in", ev.dataset);
            tc::manifest_add_file(kv, "in", ev.model);
            tc::manifest_add_file(kv, "out", ev.out);
            kv.save(ev.c.manifest);
        }
    });

    // ablate
    auto* c_ab = app.add_subcommand("ablate", "score the model with input layers noised out");
    struct {
        std::string dataset, model, split = "test", out;
        double d = 1.0;
        CommonOpts c;
    } ab;
    ab.c.seed = seed0;
    c_ab->add_option("--dataset", ab.dataset, "dataset file")->required();
    c_ab->add_option("--model", ab.model, "model file")->required();
    c_ab->add_option("--split", ab.split, "train, test or val")
        ->check(CLI::IsMember({"train", "test", "val"}));
    c_ab->add_option("--d", ab.d, "segment length, m");
    c_ab->add_option("--out", ab.out, "output metrics csv")->required();
    add_common(c_ab, ab.c);
    c_ab->callback([&] {
        const tc::Dataset ds = tc::load_dataset(ab.dataset);
        tc::Model<double> model = tc::load_model<double>(ab.model);
        const tc::SplitTag split = parse_split(ab.split);
        const std::vector<std::pair<std::string, std::set<tc::InputLayer>>> variants = {
            {"full", {tc::InputLayer::Ortho, tc::InputLayer::Class, tc::InputLayer::Height}},
            {"height", {tc::InputLayer::Height}},
            {"class", {tc::InputLayer::Class}},
            {"ortho", {tc::InputLayer::Ortho}},
            {"none", {}},
        };
        std::ofstream out(ab.out, std::ios::binary);
        if (!out) throw tc::IoError("cannot write ablation csv: " + ab.out);
        out << "variant,group,variable,rmse,mape,count\n";
        for (const auto& [name, kept] : variants) {
            tc::AblationSpec spec;
            spec.kept = kept;
            spec.noise_seed = ab.c.seed;
            const tc::MetricReport report = tc::ablate_and_evaluate(model, ds, split, spec, ab.d);
            append_report_rows(out, name, report);
            print_all_row(name, report);
        }
        if (!out) throw tc::IoError("write failed: " + ab.out);
        out.close();
        if (!ab.c.manifest.empty()) {
            auto kv = tc::make_manifest("ablate", static_cast<long long>(ab.c.seed));
            kv.set("arg.split", ab.split);
            kv.set("arg.d", ab.d);
            tc::manifest_add_file(kv, "in", ab.dataset);
            tc::manifest_add_file(kv, "in", ab.model);
            tc::manifest_add_file(kv, "out", ab.out);
            kv.save(ab.c.manifest);
        }
    });

    // baselines
    auto* c_bl = app.add_subcommand("baselines", "train and score the reference baselines");
    struct {
        std::string dataset, model, split = "test", out, optimizer = "adam";
        double d = 1.0, expected_speed = 0.0;
        int train_class = 0;
        tc::TrainConfig cfg;
        CommonOpts c;
    } bl;
    bl.c.seed = seed0;
    c_bl->add_option("--dataset", bl.dataset, "dataset file")->required();
    c_bl->add_option("--model", bl.model, "trained model for the comparison rows");
    c_bl->add_option("--split", bl.split, "train, test or val")
        ->check(CLI::IsMember({"train", "test", "val"}));
    c_bl->add_option("--d", bl.d, "segment length, m");
    c_bl->add_option("--train-class", bl.train_class,
                     "class for the single height-only baseline (0 = most common)");
    c_bl->add_option("--expected-speed", bl.expected_speed,
                     "constant speed for the timing baseline (0 = mean train velocity)");
    c_bl->add_option("--epochs", bl.cfg.epochs, "baseline training epochs");
    c_bl->add_option("--batch", bl.cfg.batch_size, "batch size");
    c_bl->add_option("--lr", bl.cfg.lr, "learning rate");
    c_bl->add_option("--optimizer", bl.optimizer, "adam or sgd")
        ->check(CLI::IsMember({"adam", "sgd"}));
    c_bl->add_option("--out", bl.out, "output metrics csv")->required();
    add_common(c_bl, bl.c);
    c_bl->callback([&] {
        const tc::Dataset ds = tc::load_dataset(bl.dataset);
        const tc::SplitTag split = parse_split(bl.split);
        bl.cfg.seed = bl.c.seed;
        bl.cfg.optimizer =
            bl.optimizer == "sgd" ? tc::OptimizerKind::Sgd : tc::OptimizerKind::Adam;
        tc::ModelSpec spec;
        spec.input_side = ds.s;

        int train_class = bl.train_class;
        double v_e = bl.expected_speed;
        {
            std::map<int, long long> counts;
            double v_sum = 0.0;
            long long n = 0;
            for (const int i : ds.indices_of(tc::SplitTag::Train)) {
                ++counts[ds.samples[i].class_label];
                v_sum += ds.samples[i].v_star;
                ++n;
            }
            if (train_class == 0) {
                long long best = -1;
                for (const auto& [label, cnt] : counts) {
                    if (cnt > best) {
                        best = cnt;
                        train_class = label;
                    }
                }
            }
            if (v_e <= 0.0 && n > 0) v_e = v_sum / static_cast<double>(n);
        }

        std::ofstream out(bl.out, std::ios::binary);
        if (!out) throw tc::IoError("cannot write baselines csv: " + bl.out);
        out << "baseline,group,variable,rmse,mape,count\n";

        tc::Model<double> model = bl.model.empty() ? tc::Model<double>(spec, 1.0, 1.0)
                                                   : tc::load_model<double>(bl.model);
        if (!bl.model.empty()) {
            const auto report =
                tc::evaluate(tc::make_model_index_predictor(model, ds), ds, split, bl.d);
            append_report_rows(out, "model", report);
            print_all_row("model", report);
        }

        tc::TrainResult<double> single =
            tc::train_height_only_single(ds, train_class, spec, bl.cfg);
        const auto single_report =
            tc::evaluate(tc::make_model_index_predictor(single.model, ds), ds, split, bl.d);
        append_report_rows(out, "height_single", single_report);
        print_all_row("height_single", single_report);

        std::map<int, tc::Model<double>> per_class =
            tc::train_height_only_per_class(ds, spec, bl.cfg);
        const auto per_class_report =
            tc::evaluate(tc::make_per_class_predictor(per_class, ds), ds, split, bl.d);
        append_report_rows(out, "height_per_class", per_class_report);
        print_all_row("height_per_class", per_class_report);

        const auto time_report = tc::baseline_expected_time(ds, split, bl.d, v_e);
        append_report_rows(out, "expected_time", time_report);
        std::printf("%-14s T mape %6.2f%% at v_e %.3f m/s\n", "expected_time",
                    time_report.all().vars[2].mape, v_e);

        if (!out) throw tc::IoError("write failed: " + bl.out);
        out.close();
        if (!bl.c.manifest.empty()) {
            auto kv = tc::make_manifest("baselines", static_cast<long long>(bl.c.seed));
            kv.set("arg.split", bl.split);
            kv.set("arg.d", bl.d);
            kv.set("arg.train_class", static_cast<long long>(train_class));
            kv.set("arg.expected_speed", v_e);
            kv.set("arg.epochs", static_cast<long long>(bl.cfg.epochs));
            tc::manifest_add_file(kv, "in", bl.dataset);
            if (!bl.model.empty()) tc::manifest_add_file(kv, "in", bl.model);
            tc::manifest_add_file(kv, "out", bl.out);
            kv.save(bl.c.manifest);
        }
    });

    // path-cost
    auto* c_pc = app.add_subcommand("path-cost", "predict time and energy along a path");
    struct {
        std::string env, model, path, out;
        double d = 1.0;
        CommonOpts c;
    } pc;
    pc.c.seed = seed0;
    c_pc->add_option("--env", pc.env, "environment directory")->required();
    c_pc->add_option("--model", pc.model, "model file")->required();
    c_pc->add_option("--path", pc.path, "waypoint csv")->required();
    c_pc->add_option("--d", pc.d, "segment length, m");
    c_pc->add_option("--out", pc.out, "output per-segment csv")->required();
    add_common(c_pc, pc.c);
    c_pc->callback([&] {
        const tc::Environment env = tc::load_environment(pc.env);
        tc::Model<double> model = tc::load_model<double>(pc.model);
        const tc::Path path = tc::load_path_csv(pc.path);
        const tc::PathCost cost =
            tc::path_cost(env, tc::make_model_predictor(model), path, pc.d);
        tc::save_path_cost_csv(cost, pc.out);
        std::printf("%zu segments, %.1f m covered: %.1f s, %.1f J -> %s\n",
                    cost.segments.size(), cost.covered_length, cost.total_time,
                    cost.total_energy, pc.out.c_str());
        if (!pc.c.manifest.empty()) {
            auto kv = tc::make_manifest("path-cost", static_cast<long long>(pc.c.seed));
            kv.set("arg.d", pc.d);
            manifest_env_inputs(kv, pc.env);
            tc::manifest_add_file(kv, "in", pc.model);
            tc::manifest_add_file(kv, "in", pc.path);
            tc::manifest_add_file(kv, "out", pc.out);
            kv.save(pc.c.manifest);
        }
    });

    // build-grid
    auto* c_bg = app.add_subcommand("build-grid", "predict edge costs over the whole map");
    struct {
        std::string env, model, out;
        double d = 1.0;
        int threads = 1;
        CommonOpts c;
    } bg;
    bg.c.seed = seed0;
    c_bg->add_option("--env", bg.env, "environment directory")->required();
    c_bg->add_option("--model", bg.model, "model file")->required();
    c_bg->add_option("--d", bg.d, "lattice stride, m");
    c_bg->add_option("--threads", bg.threads, "worker threads (runs are sequential)")
        ->check(CLI::PositiveNumber);
    c_bg->add_option("--out", bg.out, "output grid csv")->required();
    add_common(c_bg, bg.c);
    c_bg->callback([&] {
        const tc::Environment env = tc::load_environment(bg.env);
        tc::Model<double> model = tc::load_model<double>(bg.model);
        const tc::CostGrid grid =
            tc::build_cost_grid(env, tc::make_model_predictor(model), bg.d);
        tc::save_cost_grid_csv(grid, bg.out);
        long long edges = 0;
        for (const auto& node : grid.edges) {
            for (const auto& e : node) edges += e.has_value() ? 1 : 0;
        }
        std::printf("%dx%d lattice, %lld edges -> %s\n", grid.rows, grid.cols, edges,
                    bg.out.c_str());
        if (!bg.c.manifest.empty()) {
            auto kv = tc::make_manifest("build-grid", static_cast<long long>(bg.c.seed));
            kv.set("arg.d", bg.d);
            kv.set("arg.threads", static_cast<long long>(bg.threads));
            manifest_env_inputs(kv, bg.env);
            tc::manifest_add_file(kv, "in", bg.model);
            tc::manifest_add_file(kv, "out", bg.out);
            kv.save(bg.c.manifest);
        }
    });

    // plan
    auto* c_pl = app.add_subcommand("plan", "minimum-cost route on a cost grid");
    struct {
        std::string grid, out, cost_out, objective = "energy";
        std::vector<double> start, goal;
        CommonOpts c;
    } pl;
    pl.c.seed = seed0;
    c_pl->add_option("--grid", pl.grid, "cost grid csv")->required();
    c_pl->add_option("--start", pl.start, "start x y, m")->expected(2)->required();
    c_pl->add_option("--goal", pl.goal, "goal x y, m")->expected(2)->required();
    c_pl->add_option("--objective", pl.objective, "time or energy")
        ->check(CLI::IsMember({"time", "energy"}));
    c_pl->add_option("--out", pl.out, "output waypoint csv")->required();
    c_pl->add_option("--cost-out", pl.cost_out, "write the per-edge cost csv too");
    add_common(c_pl, pl.c);
    c_pl->callback([&] {
        const tc::CostGrid grid = tc::load_cost_grid_csv(pl.grid);
        const tc::PlanObjective objective =
            pl.objective == "time" ? tc::PlanObjective::Time : tc::PlanObjective::Energy;
        const tc::PlanResult result = tc::plan(grid, tc::Point{pl.start[0], pl.start[1]},
                                               tc::Point{pl.goal[0], pl.goal[1]}, objective);
        tc::save_path_csv(result.path, pl.out);
        if (!pl.cost_out.empty()) tc::save_path_cost_csv(result.cost, pl.cost_out);
        std::printf("%zu waypoints: %.1f s, %.1f J -> %s\n", result.path.points.size(),
                    result.cost.total_time, result.cost.total_energy, pl.out.c_str());
        if (!pl.c.manifest.empty()) {
            auto kv = tc::make_manifest("plan", static_cast<long long>(pl.c.seed));
            kv.set("arg.start", std::to_string(pl.start[0]) + " " + std::to_string(pl.start[1]));
            kv.set("arg.goal", std::to_string(pl.goal[0]) + " " + std::to_string(pl.goal[1]));
            kv.set("arg.objective", pl.objective);
            tc::manifest_add_file(kv, "in", pl.grid);
            tc::manifest_add_file(kv, "out", pl.out);
            if (!pl.cost_out.empty()) tc::manifest_add_file(kv, "out", pl.cost_out);
            kv.save(pl.c.manifest);
        }
    });

    // report
    auto* c_rp = app.add_subcommand("report", "per-patch truth/prediction series and plot");
    struct {
        std::string dataset, model, series_in, split = "test", variable = "w", out, svg, title,
                                               unit;
        double d = 1.0;
        int max_points = 0;
        CommonOpts c;
    } rp;
    rp.c.seed = seed0;
    c_rp->add_option("--dataset", rp.dataset, "dataset file");
    c_rp->add_option("--model", rp.model, "model file");
    c_rp->add_option("--series", rp.series_in, "render an existing series csv instead");
    c_rp->add_option("--split", rp.split, "train, test or val")
        ->check(CLI::IsMember({"train", "test", "val"}));
    c_rp->add_option("--variable", rp.variable, "w, v, T or E")
        ->check(CLI::IsMember({"w", "v", "T", "E"}));
    c_rp->add_option("--d", rp.d, "segment length, m");
    c_rp->add_option("--max-points", rp.max_points, "subsample to at most this many patches");
    c_rp->add_option("--out", rp.out, "output series csv");
    c_rp->add_option("--svg", rp.svg, "output plot svg");
    c_rp->add_option("--title", rp.title, "plot title override");
    c_rp->add_option("--unit", rp.unit, "plot unit override");
    add_common(c_rp, rp.c);
    c_rp->callback([&] {
        static const std::map<std::string, std::pair<const char*, const char*>> kLabels = {
            {"w", {"average segment power", "W"}},
            {"v", {"segment velocity", "m/s"}},
            {"T", {"segment time", "s"}},
            {"E", {"segment energy", "J"}},
        };
        std::vector<tc::SeriesPoint> series;
        if (!rp.series_in.empty()) {
            series = tc::load_series_csv(rp.series_in);
        } else {
            if (rp.dataset.empty() || rp.model.empty()) {
                throw tc::InvalidArgError("report needs --series or both --dataset and --model");
            }
            const tc::Dataset ds = tc::load_dataset(rp.dataset);
            tc::Model<double> model = tc::load_model<double>(rp.model);
            series = tc::make_series(tc::make_model_index_predictor(model, ds), ds,
                                     parse_split(rp.split), rp.d, parse_variable(rp.variable),
                                     rp.max_points);
        }
        if (rp.out.empty() && rp.svg.empty()) {
            throw tc::InvalidArgError("report needs --out or --svg");
        }
        if (!rp.out.empty()) tc::save_series_csv(series, rp.out);
        if (!rp.svg.empty()) {
            const auto& labels = kLabels.at(rp.variable);
            const std::string title = rp.title.empty() ? labels.first : rp.title;
            const std::string unit = rp.unit.empty() ? labels.second : rp.unit;
            tc::render_series_svg(series, title, unit, rp.svg);
        }
        std::printf("%zu series points%s%s\n", series.size(),
                    rp.out.empty() ? "" : (" -> " + rp.out).c_str(),
                    rp.svg.empty() ? "" : (" -> " + rp.svg).c_str());
        if (!rp.c.manifest.empty()) {
            auto kv = tc::make_manifest("report", static_cast<long long>(rp.c.seed));
            kv.set("arg.variable", rp.variable);
            kv.set("arg.split", rp.split);
            kv.set("arg.d", rp.d);
            kv.set("arg.max_points", static_cast<long long>(rp.max_points));
            if (!rp.series_in.empty()) tc::manifest_add_file(kv, "in", rp.series_in);
            if (!rp.dataset.empty()) tc::manifest_add_file(kv, "in", rp.dataset);
            if (!rp.model.empty()) tc::manifest_add_file(kv, "in", rp.model);
            if (!rp.out.empty()) tc::manifest_add_file(kv, "out", rp.out);
            if (!rp.svg.empty()) tc::manifest_add_file(kv, "out", rp.svg);
            kv.save(rp.c.manifest);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tc::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const tc::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const tc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
