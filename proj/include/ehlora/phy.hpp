#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string_view>

#include "ehlora/rng.hpp"

namespace ehlora {

constexpr int kNumRings = 6;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Thermal noise floor over `bandwidth_hz` plus a receiver noise figure.
double thermal_noise_watts(double bandwidth_hz, double noise_figure_db);

// All electrical, radio and deployment constants. Powers are stored in watts,
// the wavelength in meters; distances and the deployment disk stay in km and
// the PPP intensity in devices per km^2.
struct PhyConfig {
    double harvester_voltage = 3.3;       // V_H [V]
    double harvest_power = 1e-3;          // P_H [W]
    double capacitance = 10e-3;           // C [F]
    double load_off = 600e3;              // R_L^(0), radio OFF [ohm]
    double load_on = 117.0;               // R_L^(1), radio ON [ohm]
    double operating_voltage = 1.8;       // radio threshold [V]
    double initial_voltage = 1.8;         // V_i(0) [V]
    double tx_power = dbm_to_watts(13.0);     // P_T [W]
    double tx_overhead = dbm_to_watts(6.0);   // P_op [W]
    double bandwidth = 125e3;                 // [Hz]
    double path_loss_exponent = 2.75;         // eta >= 2
    double wavelength = 0.345;                // psi [m]
    double noise = thermal_noise_watts(125e3, 6.0);  // [W]
    double sir_threshold = db_to_linear(1.0);         // linear, 1 dB
    double disk_radius = 6.0;                 // R [km]
    double intensity = 5.0;                   // lambda [1/km^2]
    std::array<double, kNumRings + 1> ring_radii{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};  // l_0..l_6 [km]

    // R_H = V_H^2 / P_H.
    double harvester_resistance() const { return harvester_voltage * harvester_voltage / harvest_power; }

    // Equal-width annuli l_n = n R / 6.
    static std::array<double, kNumRings + 1> equal_rings(double radius_km);

    // Throws ConfigError naming the first violated invariant.
    void validate() const;
};

struct SfEntry {
    int sf;
    double bitrate_kbps;
    double airtime;           // tau [s], 25-byte payload
    double snr_threshold_db;  // table value, -6 .. -20
    double snr_threshold;     // linear q_SF = 10^(db/10)
};

// LoRa characteristics of a 25-byte message at 125 kHz, SF7..SF12.
std::span<const SfEntry, kNumRings> sf_table();
const SfEntry& sf_entry(int sf);

// Ring index n-1 (0-based) whose interval (l_{n-1}, l_n] contains d; d = l_0 maps to 0.
int ring_for_distance(double d_km, const PhyConfig& cfg);
const SfEntry& sf_for_distance(double d_km, const PhyConfig& cfg);

enum class ChargingKind { Weibull, Uniform };

std::string_view to_string(ChargingKind kind);
ChargingKind charging_kind_from_string(std::string_view s);

// Distribution of the charging / inter-transmission time nu.
class ChargingScheme {
public:
    static ChargingScheme weibull(double shape, double scale);
    static ChargingScheme uniform(double lower, double upper);

    ChargingKind kind() const { return kind_; }
    // (k, w) for Weibull, (a, b) for Uniform.
    double first() const { return p1_; }
    double second() const { return p2_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double survival(double x) const;
    double quantile(double u) const;
    double mean() const;
    double sample(Rng& rng) const;

    // Support [lo, hi]; hi is +inf for Weibull.
    double support_lo() const;
    double support_hi() const;

    bool operator==(const ChargingScheme&) const = default;

private:
    ChargingScheme(ChargingKind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

    ChargingKind kind_;
    double p1_;
    double p2_;
};

double charging_pdf(const ChargingScheme& s, double x);
double mean_charging_time(const ChargingScheme& s);

struct DutyCycle {
    double expected;      // E[tau / (nu + tau)], quadrature
    double simple_ratio;  // tau / (E[nu] + tau), the ETSI check
};

DutyCycle duty_cycle(const ChargingScheme& s, double airtime);

// Fraction of the long-run time a device spends on air, tau / (E[nu] + tau).
inline double time_average_duty(const ChargingScheme& s, double airtime) {
    return airtime / (s.mean() + airtime);
}

enum class DutyModel {
    PerCycleMean,  // E[tau/(nu+tau)], the closed-form model
    TimeAverage,   // tau/(E[nu]+tau), renewal-reward limit
};

// p = energy_avail * duty, duty according to `model`.
double collision_fraction(double energy_avail, const ChargingScheme& s, double airtime,
                          DutyModel model = DutyModel::PerCycleMean);

// E[g(nu)] by adaptive quadrature; throws NumericalError when the error
// estimate exceeds `rel_tol` relative to the result.
template <class F>
double expect_over_charging(const ChargingScheme& s, F&& g, double rel_tol = 1e-8);

}  // namespace ehlora

#include "ehlora/detail/expectation.hpp"
