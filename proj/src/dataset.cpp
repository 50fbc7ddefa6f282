#include "terracost/patch/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "terracost/core/binio.hpp"
#include "terracost/core/errors.hpp"
#include "terracost/core/rng.hpp"
#include "terracost/synth/oracle.hpp"

namespace terracost {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'P', 'D'};
constexpr std::uint16_t kVersion = 1;

int modal_class(const Patch& patch, int num_classes) {
    std::map<int, int> counts;
    const double mul = num_classes > 1 ? num_classes - 1.0 : 1.0;
    for (int i = 0; i < patch.s; ++i) {
        for (int j = 0; j < patch.s; ++j) {
            const int label = static_cast<int>(std::lround(patch.class_plane(i, j) * mul + 1.0));
            ++counts[label];
        }
    }
    int best_label = 0, best_count = -1;
    for (const auto& [label, count] : counts) {
        if (count > best_count) {
            best_label = label;
            best_count = count;
        }
    }
    return best_label;
}

double mean_chord_slope_deg(const Environment& env, const Segment& seg) {
    double sum = 0.0;
    for (int q = 0; q < 5; ++q) {
        const double t = q / 4.0;
        const double x = seg.start.x + (seg.end.x - seg.start.x) * t;
        const double y = seg.start.y + (seg.end.y - seg.start.y) * t;
        sum += directional_slope(env, x, y, seg.heading_deg);
    }
    return (sum / 5.0) * 180.0 / M_PI;
}

void write_plane(std::ostream& out, const Grid<float>& plane) {
    write_bytes(out, plane.data(), sizeof(float) * plane.size());
}

void read_plane(std::istream& in, Grid<float>& plane, int s, const char* what) {
    plane.resize(s, s);
    read_bytes(in, plane.data(), sizeof(float) * plane.size(), what);
}

}  // namespace

std::vector<int> Dataset::indices_of(SplitTag tag) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (tags[i] == tag) out.push_back(static_cast<int>(i));
    }
    return out;
}

long long Dataset::count_of(SplitTag tag) const {
    return std::count(tags.begin(), tags.end(), tag);
}

Dataset build_dataset(const Environment& env, const std::vector<TrajectoryLog>& logs,
                      const DatasetBuildParams& params) {
    if (!(params.d > 0.0)) throw InvalidArgError("segment length d must be positive");
    if (std::abs(params.train_fraction + params.test_fraction - 1.0) > 1e-9) {
        throw InvalidArgError("train and test fractions must sum to 1");
    }
    if (params.train_fraction < 0.0 || params.test_fraction < 0.0) {
        throw InvalidArgError("split fractions must be non-negative");
    }
    if (params.min_records < 2) throw InvalidArgError("min_records must be >= 2");

    Dataset ds;
    std::vector<int> shufflable;  // sample indices outside the val region

    for (const TrajectoryLog& log : logs) {
        std::vector<Point> pts;
        std::vector<std::size_t> rec_of_pt;
        for (std::size_t i = 0; i < log.size(); ++i) {
            Point p{log[i].x, log[i].y};
            if (pts.empty() || !(pts.back() == p)) {
                pts.push_back(p);
                rec_of_pt.push_back(i);
            }
        }
        if (pts.size() < 2) continue;

        std::vector<double> arc(pts.size(), 0.0);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            arc[i] = arc[i - 1] + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
        }

        const Path path(pts);
        const std::vector<Segment> segments = segment_path(path, params.d);

        std::size_t lo = 0;
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const double a0 = static_cast<double>(k) * params.d - 1e-9;
            const double a1 = static_cast<double>(k + 1) * params.d + 1e-9;
            while (lo < arc.size() && arc[lo] < a0) ++lo;
            std::size_t hi = lo;
            while (hi < arc.size() && arc[hi] <= a1) ++hi;
            const std::size_t count = hi - lo;
            if (count < static_cast<std::size_t>(params.min_records)) {
                ++ds.skipped;
                continue;
            }

            double power_sum = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const LogRecord& r = log[rec_of_pt[i]];
                power_sum += r.voltage * r.current;
            }
            const double t_first = log[rec_of_pt[lo]].t;
            const double t_last = log[rec_of_pt[hi - 1]].t;
            if (!(t_last > t_first)) {
                ++ds.skipped;
                continue;
            }

            Sample sample;
            try {
                sample.patch = extract_patch(env, segments[k], params.d);
            } catch (const Error&) {
                ++ds.skipped;
                continue;
            }
            sample.w_star = power_sum / static_cast<double>(count);
            sample.v_star = params.d / (t_last - t_first);
            sample.class_label = modal_class(sample.patch, env.num_classes);
            sample.slope_deg = mean_chord_slope_deg(env, segments[k]);

            if (ds.s == 0) ds.s = sample.patch.s;

            const double mx = (segments[k].start.x + segments[k].end.x) / 2.0;
            const double my = (segments[k].start.y + segments[k].end.y) / 2.0;
            const bool in_val = params.val_region && params.val_region->contains(mx, my);

            ds.samples.push_back(std::move(sample));
            ds.tags.push_back(in_val ? SplitTag::Val : SplitTag::Train);
            if (!in_val) shufflable.push_back(static_cast<int>(ds.samples.size()) - 1);
        }
    }

    if (ds.samples.empty()) throw EmptyDatasetError("no usable segments in the logs");

    SplitMix64 rng(derive_seed(params.seed, 0x73'70'6C'69'74ULL));
    rng.shuffle(shufflable);
    const auto n_train = static_cast<std::size_t>(
        std::llround(params.train_fraction * static_cast<double>(shufflable.size())));
    for (std::size_t i = 0; i < shufflable.size(); ++i) {
        ds.tags[shufflable[i]] = i < n_train ? SplitTag::Train : SplitTag::Test;
    }

    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        if (ds.tags[i] != SplitTag::Train) continue;
        ds.max_w = std::max(ds.max_w, ds.samples[i].w_star);
        ds.max_v = std::max(ds.max_v, ds.samples[i].v_star);
    }
    if (ds.count_of(SplitTag::Train) == 0) throw EmptyDatasetError("train split is empty");
    if (!(ds.max_w > 0.0) || !(ds.max_v > 0.0)) {
        throw ZeroTruthError("train normalizers must be positive");
    }
    return ds;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad TCPD magic: " + path);
    const auto version = read_le<std::uint16_t>(in, "version");
    if (version != kVersion) throw FormatError("unsupported TCPD version " + std::to_string(version));

    const auto s = read_le<std::uint32_t>(in, "patch side");
    if (s == 0 || s > 4096) throw FormatError("implausible patch side " + std::to_string(s));
    const auto count = read_le<std::uint64_t>(in, "sample count");

    Dataset ds;
    ds.s = static_cast<int>(s);
    ds.samples.resize(count);
    ds.tags.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Sample& sample = ds.samples[i];
        sample.patch.s = ds.s;
        read_plane(in, sample.patch.ortho, ds.s, "ortho plane");
        read_plane(in, sample.patch.class_plane, ds.s, "class plane");
        read_plane(in, sample.patch.height, ds.s, "height plane");
        sample.w_star = read_le<float>(in, "w label");
        sample.v_star = read_le<float>(in, "v label");
        sample.class_label = read_le<std::uint8_t>(in, "class label");
        sample.slope_deg = read_le<float>(in, "slope");
        const auto tag = read_le<std::uint8_t>(in, "split tag");
        if (tag > 2) throw FormatError("bad split tag " + std::to_string(tag));
        ds.tags[i] = static_cast<SplitTag>(tag);
    }
    ds.max_w = read_le<float>(in, "max_w");
    ds.max_v = read_le<float>(in, "max_v");

    in.peek();
    if (!in.eof()) throw FormatError("trailing bytes after samples: " + path);
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    if (ds.samples.size() != ds.tags.size()) throw InvalidArgError("samples and tags disagree");
    for (const Sample& sample : ds.samples) {
        if (sample.patch.s != ds.s) throw InvalidArgError("mixed patch sizes in dataset");
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset: " + path);
    out.write(kMagic, 4);
    write_le<std::uint16_t>(out, kVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.s));
    write_le<std::uint64_t>(out, ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const Sample& sample = ds.samples[i];
        write_plane(out, sample.patch.ortho);
        write_plane(out, sample.patch.class_plane);
        write_plane(out, sample.patch.height);
        write_le<float>(out, static_cast<float>(sample.w_star));
        write_le<float>(out, static_cast<float>(sample.v_star));
        write_le<std::uint8_t>(out, static_cast<std::uint8_t>(sample.class_label));
        write_le<float>(out, static_cast<float>(sample.slope_deg));
        write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ds.tags[i]));
    }
    write_le<float>(out, static_cast<float>(ds.max_w));
    write_le<float>(out, static_cast<float>(ds.max_v));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace terracost
