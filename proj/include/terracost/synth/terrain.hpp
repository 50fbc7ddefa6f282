#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace terracost {

/// Physical stand-in for one terrain class: rolling resistance drives power,
/// speed_factor caps attainable velocity, ortho_mean/noise paint the class
/// in the synthetic orthophoto.
struct TerrainParams {
    int class_label = 0;
    double rolling_resistance = 0.05;  // mu_c, > 0
    double speed_factor = 1.0;         // kappa_c, (0, 1]
    double ortho_mean = 0.5;           // grayscale
    double ortho_noise = 0.03;         // std-dev
};

/// Differential-drive oracle parameters. Defaults mirror the recorded
/// platform where the source gives numbers (v_max 1 m/s, 20 Hz, 24 V).
struct OracleConfig {
    double mass = 50.0;           // kg
    double gravity = 9.81;        // m/s^2
    double idle_power = 30.0;     // W
    double v_max = 1.0;           // m/s
    double uphill_gain = 0.8;     // a+ (per unit tan slope)
    double downhill_gain = 0.3;   // a-
    double v_min = 0.1;           // m/s
    double sample_rate = 20.0;    // Hz
    double battery_voltage = 24.0;  // V
    double current_noise = 0.05;  // std-dev, A
    std::vector<TerrainParams> terrain;
    std::uint64_t seed = 0;

    /// Grass / mud / unpaved / paved on labels 4..7 (the traversable tail
    /// of a 7-class map).
    static OracleConfig defaults();

    const TerrainParams& params_for(int class_label) const;
    bool is_known_class(int class_label) const;
    void validate() const;
};

/// Key-value text config round-trip (`key = value` per line; terrain rows
/// keyed class<label>.rolling_resistance etc., enumerated by `classes`).
OracleConfig load_oracle_config(const std::string& path);
void save_oracle_config(const OracleConfig& cfg, const std::string& path);

}  // namespace terracost
