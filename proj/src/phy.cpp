#include "ehlora/phy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ehlora/error.hpp"

namespace ehlora {

double thermal_noise_watts(double bandwidth_hz, double noise_figure_db) {
    return dbm_to_watts(-174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

std::array<double, kNumRings + 1> PhyConfig::equal_rings(double radius_km) {
    std::array<double, kNumRings + 1> l{};
    for (int n = 0; n <= kNumRings; ++n) l[n] = radius_km * n / kNumRings;
    l[kNumRings] = radius_km;
    return l;
}

void PhyConfig::validate() const {
    auto require = [](bool ok, const char* field, const std::string& what) {
        if (!ok) throw ConfigError(field, what);
    };
    require(harvester_voltage > 0, "harvester.voltage", "must be positive");
    require(harvest_power > 0, "harvester.power", "must be positive");
    require(capacitance > 0, "capacitor.capacitance", "must be positive");
    require(load_off > 0 && load_on > 0, "capacitor.load", "load resistances must be positive");
    require(load_on < load_off, "capacitor.load_on", "radio-ON load must be smaller than radio-OFF load");
    require(operating_voltage > 0 && operating_voltage < harvester_voltage, "capacitor.operating_voltage",
            "must lie in (0, V_H)");
    require(initial_voltage >= 0 && initial_voltage <= harvester_voltage, "capacitor.initial_voltage",
            "must lie in [0, V_H]");
    require(tx_power > 0, "radio.tx_power", "must be positive");
    require(tx_overhead >= 0, "radio.tx_overhead", "must be non-negative");
    require(bandwidth > 0, "radio.bandwidth", "must be positive");
    require(path_loss_exponent >= 2, "radio.path_loss_exponent", "must be >= 2");
    require(wavelength > 0, "radio.wavelength", "must be positive");
    require(noise >= 0, "radio.noise", "must be non-negative");
    require(sir_threshold > 0, "radio.sir_threshold", "must be positive");
    require(disk_radius > 0, "deployment.radius", "must be positive");
    require(intensity >= 0, "deployment.intensity", "must be non-negative");
    require(ring_radii[0] >= 0, "deployment.rings", "l0 must be non-negative");
    for (int n = 1; n <= kNumRings; ++n) {
        require(ring_radii[n] >= ring_radii[n - 1], "deployment.rings", "ring radii must be nondecreasing");
    }
    require(std::abs(ring_radii[kNumRings] - disk_radius) <= 1e-12 * disk_radius, "deployment.rings",
            "outermost ring radius must equal the disk radius");
}

namespace {

constexpr std::array<SfEntry, kNumRings> kSfTable{{
    {7, 5.47, 0.0366, -6.0, 0.0},
    {8, 3.13, 0.064, -9.0, 0.0},
    {9, 1.76, 0.113, -12.0, 0.0},
    {10, 0.98, 0.204, -15.0, 0.0},
    {11, 0.54, 0.372, -17.5, 0.0},
    {12, 0.29, 0.682, -20.0, 0.0},
}};

std::array<SfEntry, kNumRings> make_table() {
    auto t = kSfTable;
    for (auto& e : t) e.snr_threshold = db_to_linear(e.snr_threshold_db);
    return t;
}

}  // namespace

std::span<const SfEntry, kNumRings> sf_table() {
    static const std::array<SfEntry, kNumRings> table = make_table();
    return table;
}

const SfEntry& sf_entry(int sf) {
    if (sf < 7 || sf > 12) throw OutOfRangeError("spreading factor " + std::to_string(sf) + " outside 7..12");
    return sf_table()[sf - 7];
}

int ring_for_distance(double d_km, const PhyConfig& cfg) {
    const auto& l = cfg.ring_radii;
    if (!(d_km >= 0.0) || d_km > l[kNumRings]) {
        throw OutOfRangeError("distance " + std::to_string(d_km) + " km outside the deployment disk [0, " +
                              std::to_string(l[kNumRings]) + "]");
    }
    // First n with d <= l_n, i.e. d in (l_{n-1}, l_n].
    const auto it = std::lower_bound(l.begin() + 1, l.end(), d_km);
    return static_cast<int>(it - (l.begin() + 1));
}

const SfEntry& sf_for_distance(double d_km, const PhyConfig& cfg) {
    return sf_table()[ring_for_distance(d_km, cfg)];
}

std::string_view to_string(ChargingKind kind) {
    return kind == ChargingKind::Weibull ? "weibull" : "uniform";
}

ChargingKind charging_kind_from_string(std::string_view s) {
    if (s == "weibull" || s == "wd" || s == "WD") return ChargingKind::Weibull;
    if (s == "uniform" || s == "ud" || s == "UD") return ChargingKind::Uniform;
    throw ConfigError("scheme.kind", "unknown charging distribution '" + std::string(s) + "'");
}

ChargingScheme ChargingScheme::weibull(double shape, double scale) {
    if (!(shape > 0) || !(scale > 0)) throw ConfigError("scheme", "Weibull requires k > 0 and w > 0");
    return {ChargingKind::Weibull, shape, scale};
}

ChargingScheme ChargingScheme::uniform(double lower, double upper) {
    if (!(lower >= 0) || !(upper > lower)) throw ConfigError("scheme", "Uniform requires 0 <= a < b");
    return {ChargingKind::Uniform, lower, upper};
}

double ChargingScheme::pdf(double x) const {
    if (kind_ == ChargingKind::Uniform) return (x >= p1_ && x <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    if (x < 0) return 0.0;
    const double k = p1_, w = p2_;
    const double r = x / w;
    return (k / w) * std::pow(r, k - 1.0) * std::exp(-std::pow(r, k));
}

double ChargingScheme::cdf(double x) const {
    if (kind_ == ChargingKind::Uniform) return std::clamp((x - p1_) / (p2_ - p1_), 0.0, 1.0);
    if (x <= 0) return 0.0;
    return -std::expm1(-std::pow(x / p2_, p1_));
}

double ChargingScheme::survival(double x) const {
    if (kind_ == ChargingKind::Uniform) return 1.0 - cdf(x);
    if (x <= 0) return 1.0;
    return std::exp(-std::pow(x / p2_, p1_));
}

double ChargingScheme::quantile(double u) const {
    if (kind_ == ChargingKind::Uniform) return p1_ + (p2_ - p1_) * u;
    return p2_ * std::pow(-std::log1p(-u), 1.0 / p1_);
}

double ChargingScheme::mean() const {
    if (kind_ == ChargingKind::Uniform) return 0.5 * (p1_ + p2_);
    return p2_ * std::tgamma(1.0 + 1.0 / p1_);
}

double ChargingScheme::sample(Rng& rng) const { return quantile(rng.uniform()); }

double ChargingScheme::support_lo() const { return kind_ == ChargingKind::Uniform ? p1_ : 0.0; }

double ChargingScheme::support_hi() const {
    return kind_ == ChargingKind::Uniform ? p2_ : std::numeric_limits<double>::infinity();
}

double charging_pdf(const ChargingScheme& s, double x) { return s.pdf(x); }

double mean_charging_time(const ChargingScheme& s) { return s.mean(); }

DutyCycle duty_cycle(const ChargingScheme& s, double airtime) {
    if (airtime < 0) throw OutOfRangeError("airtime must be non-negative");
    if (airtime == 0) return {0.0, 0.0};
    const double expected = expect_over_charging(s, [airtime](double nu) { return airtime / (nu + airtime); });
    return {expected, time_average_duty(s, airtime)};
}

double collision_fraction(double energy_avail, const ChargingScheme& s, double airtime, DutyModel model) {
    if (!(energy_avail >= 0.0 && energy_avail <= 1.0)) {
        throw OutOfRangeError("energy availability must lie in [0, 1]");
    }
    if (energy_avail == 0.0) return 0.0;
    const double duty =
        model == DutyModel::PerCycleMean ? duty_cycle(s, airtime).expected : time_average_duty(s, airtime);
    return energy_avail * duty;
}

}  // namespace ehlora
