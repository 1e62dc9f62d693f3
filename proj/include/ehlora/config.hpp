#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ehlora/capacitor.hpp"
#include "ehlora/phy.hpp"

namespace ehlora {

// Everything a run needs besides the seed. Loaded from an INI file:
//
//   [harvester]   voltage, power_dbm
//   [capacitor]   capacitance, load_off, load_on, operating_voltage, initial_voltage, mode
//   [radio]       tx_power_dbm, tx_overhead_dbm, bandwidth, path_loss_exponent, wavelength_m,
//                 noise_dbm, noise_figure_db, sir_threshold_db
//   [deployment]  radius, intensity, rings
//   [scheme]      ud_a, ud_b, wd_k, wd_w, default
//   [markov]      bins
//
// Every key is optional; missing keys keep their defaults.
struct Config {
    PhyConfig phy;
    CapacitorMode mode = CapacitorMode::Thevenin;
    ChargingScheme uniform = ChargingScheme::uniform(0.0, 100.0);
    ChargingScheme weibull = ChargingScheme::weibull(1.0, 50.0);
    ChargingKind default_kind = ChargingKind::Uniform;
    int bins = 2000;

    const ChargingScheme& scheme(ChargingKind kind) const {
        return kind == ChargingKind::Uniform ? uniform : weibull;
    }
};

// Throws ConfigError with the offending line and key.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

// Resolved snapshot in the same INI format; parse_config(to_ini(c)) == c.
std::string to_ini(const Config& c);

// Environment variable naming the default config file.
constexpr const char* kConfigEnvVar = "EHLORA_CONFIG";

}  // namespace ehlora
