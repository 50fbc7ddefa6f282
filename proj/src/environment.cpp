#include "terracost/env/environment.hpp"

#include <filesystem>
#include <sstream>

#include "terracost/core/config.hpp"
#include "terracost/core/errors.hpp"

namespace terracost {

namespace fs = std::filesystem;

void Environment::validate() const {
    const auto same_shape = [&](const Raster& r) {
        return r.width == ortho.width && r.height == ortho.height && r.geo == ortho.geo;
    };
    if (!same_shape(height) || !same_shape(class_map)) {
        throw InvalidArgError("environment rasters disagree on shape or geo-transform");
    }
    if (ortho.kind != RasterKind::Ortho || height.kind != RasterKind::Height ||
        class_map.kind != RasterKind::Class) {
        throw InvalidArgError("environment raster kinds are mislabeled");
    }
    if (num_classes < 1) throw InvalidArgError("num_classes must be >= 1");
    for (int label : traversable) {
        if (label < 1 || label > num_classes) {
            throw InvalidArgError("traversable label " + std::to_string(label) +
                                  " outside [1, " + std::to_string(num_classes) + "]");
        }
    }
}

Environment load_environment(const std::string& dir) {
    Environment env;
    env.ortho = load_raster((fs::path(dir) / "ortho.tcrs").string());
    env.height = load_raster((fs::path(dir) / "height.tcrs").string());
    env.class_map = load_raster((fs::path(dir) / "class.tcrs").string());

    KeyValueConfig cfg = KeyValueConfig::load((fs::path(dir) / "env.cfg").string());
    env.num_classes = static_cast<int>(cfg.get_int("num_classes"));
    for (int label : cfg.get_int_list("traversable")) env.traversable.insert(label);
    env.validate();
    return env;
}

void save_environment(const Environment& env, const std::string& dir) {
    env.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    save_raster(env.ortho, (fs::path(dir) / "ortho.tcrs").string());
    save_raster(env.height, (fs::path(dir) / "height.tcrs").string());
    save_raster(env.class_map, (fs::path(dir) / "class.tcrs").string());

    KeyValueConfig cfg;
    cfg.set("num_classes", static_cast<long long>(env.num_classes));
    std::ostringstream labels;
    bool first = true;
    for (int label : env.traversable) {
        if (!first) labels << ",";
        labels << label;
        first = false;
    }
    cfg.set("traversable", labels.str());
    cfg.save((fs::path(dir) / "env.cfg").string());
}

}  // namespace terracost
