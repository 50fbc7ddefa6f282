#include "terracost/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "terracost/core/errors.hpp"

namespace terracost {

void save_metric_report_csv(const MetricReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report csv: " + path);
    out << "group,variable,rmse,mape,count\n";
    char buf[160];
    for (const GroupMetrics& g : report.groups) {
        for (int v = 0; v < 4; ++v) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g,%lld\n", g.name.c_str(),
                          kVariableNames[v], g.vars[v].rmse, g.vars[v].mape, g.count);
            out << buf;
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<SeriesPoint> make_series(const IndexPredictor& predictor, const Dataset& ds,
                                     SplitTag split, double d, Variable variable,
                                     int max_points) {
    if (!(d > 0.0)) throw InvalidArgError("segment length d must be positive");
    std::vector<int> indices = ds.indices_of(split);
    if (indices.empty()) throw EmptyDatasetError("split has no samples for a series");

    std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
        return ds.samples[a].class_label < ds.samples[b].class_label;
    });
    if (max_points > 0 && static_cast<int>(indices.size()) > max_points) {
        std::vector<int> kept;
        kept.reserve(max_points);
        const double stride = static_cast<double>(indices.size()) / max_points;
        for (int i = 0; i < max_points; ++i) {
            kept.push_back(indices[static_cast<std::size_t>(i * stride)]);
        }
        indices = std::move(kept);
    }

    const auto preds = predictor(indices);
    if (preds.size() != indices.size()) {
        throw ShapeMismatchError("predictor returned " + std::to_string(preds.size()) +
                                 " results for " + std::to_string(indices.size()) + " samples");
    }

    std::vector<SeriesPoint> series;
    series.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const Sample& s = ds.samples[indices[i]];
        const double w_hat = preds[i].first;
        const double v_hat = preds[i].second;
        const double v_div = std::max(v_hat, 1e-6);

        SeriesPoint p;
        p.patch_no = static_cast<int>(i) + 1;
        p.class_label = s.class_label;
        switch (variable) {
            case Variable::Power:
                p.truth = s.w_star;
                p.pred = w_hat;
                break;
            case Variable::Velocity:
                p.truth = s.v_star;
                p.pred = v_hat;
                break;
            case Variable::Time:
                p.truth = s.v_star > 0.0 ? d / s.v_star : 0.0;
                p.pred = d / v_div;
                break;
            case Variable::Energy:
                p.truth = s.v_star > 0.0 ? s.w_star * d / s.v_star : 0.0;
                p.pred = w_hat * d / v_div;
                break;
        }
        p.ape = p.truth != 0.0 ? std::abs(p.pred - p.truth) / std::abs(p.truth)
                               : std::numeric_limits<double>::quiet_NaN();
        series.push_back(p);
    }
    return series;
}

void save_series_csv(const std::vector<SeriesPoint>& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write series csv: " + path);
    out << "patch_no,terrain,truth,pred,ape\n";
    char buf[160];
    for (const SeriesPoint& p : series) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g\n", p.patch_no, p.class_label,
                      p.truth, p.pred, p.ape);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<SeriesPoint> load_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty series csv: " + path);
    std::vector<SeriesPoint> series;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        SeriesPoint p;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        if (!(ss >> p.patch_no >> c1 >> p.class_label >> c2 >> p.truth >> c3 >> p.pred >> c4 >>
              p.ape) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
            throw FormatError("bad series csv line: " + line);
        }
        series.push_back(p);
    }
    return series;
}

namespace {

struct Scale {
    double lo, hi, y0, y1;  // value range mapped to pixel range (y grows down)
    double operator()(double v) const { return y1 - (v - lo) / (hi - lo) * (y1 - y0); }
};

std::string polyline(const std::vector<SeriesPoint>& series, double x0, double dx,
                     const Scale& scale, bool truth) {
    std::string pts;
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double v = truth ? series[i].truth : series[i].pred;
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x0 + dx * static_cast<double>(i),
                      scale(v));
        pts += buf;
    }
    return pts;
}

}  // namespace

void render_series_svg(const std::vector<SeriesPoint>& series, const std::string& title,
                       const std::string& unit, const std::string& path) {
    if (series.empty()) throw InvalidArgError("cannot render an empty series");

    const double width = 960.0, height = 470.0;
    const double x0 = 60.0, x1 = 930.0;
    const Scale top{0.0, 1.0, 40.0, 260.0};
    const Scale bot{0.0, 1.0, 305.0, 430.0};

    double vmax = 0.0, amax = 0.0;
    for (const SeriesPoint& p : series) {
        vmax = std::max({vmax, p.truth, p.pred});
        if (std::isfinite(p.ape)) amax = std::max(amax, p.ape * 100.0);
    }
    if (vmax <= 0.0) vmax = 1.0;
    if (amax <= 0.0) amax = 10.0;
    Scale val = top;
    val.lo = 0.0;
    val.hi = vmax * 1.1;
    Scale apes = bot;
    apes.lo = 0.0;
    apes.hi = amax * 1.1;

    const double dx = series.size() > 1 ? (x1 - x0) / static_cast<double>(series.size() - 1) : 0.0;

    std::ostringstream svg;
    char buf[512];
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    // Terrain bands across both panels.
    std::size_t band_start = 0;
    bool shade = false;
    for (std::size_t i = 1; i <= series.size(); ++i) {
        if (i == series.size() || series[i].class_label != series[band_start].class_label) {
            const double bx0 = x0 + dx * static_cast<double>(band_start) - dx / 2.0;
            const double bx1 = x0 + dx * static_cast<double>(i - 1) + dx / 2.0;
            if (shade) {
                std::snprintf(buf, sizeof(buf),
                              "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                              "fill=\"#eef2f7\"/>\n",
                              bx0, top.y0, bx1 - bx0, bot.y1 - top.y0);
                svg << buf;
            }
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" fill=\"#666666\" "
                          "text-anchor=\"middle\" font-family=\"sans-serif\">c%d</text>\n",
                          (bx0 + bx1) / 2.0, top.y0 - 6.0, series[band_start].class_label);
            svg << buf;
            band_start = i;
            shade = !shade;
        }
    }

    // Grid lines and labels.
    for (int t = 0; t <= 4; ++t) {
        const double vv = val.lo + (val.hi - val.lo) * t / 4.0;
        const double av = apes.lo + (apes.hi - apes.lo) * t / 4.0;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.2f\" x2=\"%.1f\" y2=\"%.2f\" stroke=\"#dddddd\"/>"
                      "<text x=\"%.1f\" y=\"%.2f\" font-size=\"10\" fill=\"#444444\" "
                      "text-anchor=\"end\" font-family=\"sans-serif\">%.3g</text>\n",
                      x0, val(vv), x1, val(vv), x0 - 6.0, val(vv) + 3.0, vv);
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.2f\" x2=\"%.1f\" y2=\"%.2f\" stroke=\"#dddddd\"/>"
                      "<text x=\"%.1f\" y=\"%.2f\" font-size=\"10\" fill=\"#444444\" "
                      "text-anchor=\"end\" font-family=\"sans-serif\">%.3g%%</text>\n",
                      x0, apes(av), x1, apes(av), x0 - 6.0, apes(av) + 3.0, av);
        svg << buf;
    }

    svg << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\""
        << polyline(series, x0, dx, val, true) << "\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\""
        << polyline(series, x0, dx, val, false) << "\"/>\n";

    std::string ape_pts;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!std::isfinite(series[i].ape)) continue;
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x0 + dx * static_cast<double>(i),
                      apes(series[i].ape * 100.0));
        ape_pts += buf;
    }
    svg << "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.2\" points=\"" << ape_pts
        << "\"/>\n";

    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"20\" font-size=\"14\" fill=\"#222222\" "
                  "font-family=\"sans-serif\">%s (%s)</text>\n",
                  x0, title.c_str(), unit.c_str());
    svg << buf;
    svg << "<text x=\"" << x1 - 180 << "\" y=\"20\" font-size=\"11\" fill=\"#d62728\" "
        << "font-family=\"sans-serif\">truth</text>\n";
    svg << "<text x=\"" << x1 - 130 << "\" y=\"20\" font-size=\"11\" fill=\"#1f77b4\" "
        << "font-family=\"sans-serif\">prediction</text>\n";
    svg << "<text x=\"" << x1 - 50 << "\" y=\"20\" font-size=\"11\" fill=\"#2ca02c\" "
        << "font-family=\"sans-serif\">APE</text>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"#444444\" "
                  "font-family=\"sans-serif\" text-anchor=\"middle\">patch number</text>\n",
                  (x0 + x1) / 2.0, height - 12.0);
    svg << buf;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write svg: " + path);
    out << svg.str() << "</svg>\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace terracost
