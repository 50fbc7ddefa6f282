#include "terracost/synth/terrain.hpp"

#include <algorithm>
#include <cmath>

#include "terracost/core/config.hpp"
#include "terracost/core/errors.hpp"

namespace terracost {

OracleConfig OracleConfig::defaults() {
    OracleConfig cfg;
    cfg.terrain = {
        {4, 0.15, 0.9, 0.35, 0.03},
        {5, 0.25, 0.7, 0.20, 0.02},
        {6, 0.08, 1.0, 0.55, 0.05},
        {7, 0.05, 1.0, 0.80, 0.04},
    };
    return cfg;
}

const TerrainParams& OracleConfig::params_for(int class_label) const {
    for (const auto& t : terrain) {
        if (t.class_label == class_label) return t;
    }
    throw NonTraversableError("class " + std::to_string(class_label) + " has no terrain parameters");
}

bool OracleConfig::is_known_class(int class_label) const {
    return std::any_of(terrain.begin(), terrain.end(),
                       [&](const TerrainParams& t) { return t.class_label == class_label; });
}

void OracleConfig::validate() const {
    if (mass <= 0.0) throw InvalidArgError("mass must be positive");
    if (gravity <= 0.0) throw InvalidArgError("gravity must be positive");
    if (idle_power < 0.0) throw InvalidArgError("idle_power must be non-negative");
    if (v_max <= 0.0) throw InvalidArgError("v_max must be positive");
    if (v_min <= 0.0 || v_min > v_max) throw InvalidArgError("v_min must be in (0, v_max]");
    if (uphill_gain < 0.0 || downhill_gain < 0.0) throw InvalidArgError("slope gains must be non-negative");
    if (sample_rate <= 0.0) throw InvalidArgError("sample_rate must be positive");
    if (battery_voltage <= 0.0) throw InvalidArgError("battery_voltage must be positive");
    if (current_noise < 0.0) throw InvalidArgError("current_noise must be non-negative");
    if (terrain.empty()) throw InvalidArgError("terrain table is empty");
    for (const auto& t : terrain) {
        if (t.class_label <= 0) throw InvalidArgError("terrain class labels must be positive");
        if (t.rolling_resistance <= 0.0) throw InvalidArgError("rolling_resistance must be positive");
        if (t.speed_factor <= 0.0 || t.speed_factor > 1.0) throw InvalidArgError("speed_factor must be in (0,1]");
        if (t.ortho_mean < 0.0 || t.ortho_mean > 1.0) throw InvalidArgError("ortho_mean must be in [0,1]");
        if (t.ortho_noise < 0.0) throw InvalidArgError("ortho_noise must be non-negative");
        int dup = 0;
        for (const auto& u : terrain) dup += (u.class_label == t.class_label) ? 1 : 0;
        if (dup != 1) throw InvalidArgError("duplicate terrain class " + std::to_string(t.class_label));
    }
}

OracleConfig load_oracle_config(const std::string& path) {
    KeyValueConfig kv = KeyValueConfig::load(path);
    OracleConfig cfg;
    cfg.mass = kv.get_double("mass", cfg.mass);
    cfg.gravity = kv.get_double("gravity", cfg.gravity);
    cfg.idle_power = kv.get_double("idle_power", cfg.idle_power);
    cfg.v_max = kv.get_double("v_max", cfg.v_max);
    cfg.uphill_gain = kv.get_double("uphill_gain", cfg.uphill_gain);
    cfg.downhill_gain = kv.get_double("downhill_gain", cfg.downhill_gain);
    cfg.v_min = kv.get_double("v_min", cfg.v_min);
    cfg.sample_rate = kv.get_double("sample_rate", cfg.sample_rate);
    cfg.battery_voltage = kv.get_double("battery_voltage", cfg.battery_voltage);
    cfg.current_noise = kv.get_double("current_noise", cfg.current_noise);
    cfg.seed = static_cast<uint64_t>(kv.get_int("seed", static_cast<long long>(cfg.seed)));
    std::vector<int> labels = kv.has("classes") ? kv.get_int_list("classes") : std::vector<int>{};
    for (int label : labels) {
        std::string p = "class" + std::to_string(label) + ".";
        TerrainParams t;
        t.class_label = label;
        t.rolling_resistance = kv.get_double(p + "rolling_resistance", 0.1);
        t.speed_factor = kv.get_double(p + "speed_factor", 1.0);
        t.ortho_mean = kv.get_double(p + "ortho_mean", 0.5);
        t.ortho_noise = kv.get_double(p + "ortho_noise", 0.03);
        cfg.terrain.push_back(t);
    }
    if (cfg.terrain.empty()) cfg.terrain = OracleConfig::defaults().terrain;
    cfg.validate();
    return cfg;
}

void save_oracle_config(const OracleConfig& cfg, const std::string& path) {
    KeyValueConfig kv;
    kv.set("mass", cfg.mass);
    kv.set("gravity", cfg.gravity);
    kv.set("idle_power", cfg.idle_power);
    kv.set("v_max", cfg.v_max);
    kv.set("uphill_gain", cfg.uphill_gain);
    kv.set("downhill_gain", cfg.downhill_gain);
    kv.set("v_min", cfg.v_min);
    kv.set("sample_rate", cfg.sample_rate);
    kv.set("battery_voltage", cfg.battery_voltage);
    kv.set("current_noise", cfg.current_noise);
    kv.set("seed", static_cast<long long>(cfg.seed));
    std::string labels;
    for (const auto& t : cfg.terrain) {
        if (!labels.empty()) labels += ",";
        labels += std::to_string(t.class_label);
        std::string p = "class" + std::to_string(t.class_label) + ".";
        kv.set(p + "rolling_resistance", t.rolling_resistance);
        kv.set(p + "speed_factor", t.speed_factor);
        kv.set(p + "ortho_mean", t.ortho_mean);
        kv.set(p + "ortho_noise", t.ortho_noise);
    }
    kv.set("classes", labels);
    kv.save(path);
}

}  // namespace terracost
