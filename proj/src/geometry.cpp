#include "ehlora/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ehlora/error.hpp"
#include "ehlora/hyp2f1.hpp"

namespace ehlora {

double path_gain(double d_km, const PhyConfig& cfg) {
    if (!(d_km > 0.0)) throw OutOfRangeError("path gain is singular at d = 0; clamp the distance first");
    const double d_m = d_km * 1000.0;
    return std::pow(cfg.wavelength / (4.0 * std::numbers::pi * d_m), cfg.path_loss_exponent);
}

double snr_success(double d_km, const PhyConfig& cfg) {
    const auto& sf = sf_for_distance(d_km, cfg);
    if (cfg.noise == 0.0) return 1.0;
    const double g = path_gain(std::max(d_km, kMinDistanceKm), cfg);
    return std::exp(-cfg.noise * sf.snr_threshold / (cfg.tx_power * g));
}

double sir_success_annulus(double d_km, double p, double intensity, double eta, double wp, double inner_km,
                           double outer_km) {
    if (p == 0.0 || intensity == 0.0) return 1.0;
    const double d = std::max(d_km, kMinDistanceKm);
    auto antiderivative = [&](double x) {
        if (x <= 0.0) return 0.0;
        return 0.5 * x * x * hyp2f1_special(eta, -std::pow(x / d, eta) / wp);
    };
    const double integral = antiderivative(outer_km) - antiderivative(inner_km);
    return std::exp(-2.0 * std::numbers::pi * p * intensity * integral);
}

double sir_success(double d_km, double p, const PhyConfig& cfg) {
    if (!(p >= 0.0 && p <= 1.0)) throw OutOfRangeError("collision fraction must lie in [0, 1]");
    const int ring = ring_for_distance(d_km, cfg);
    return sir_success_annulus(d_km, p, cfg.intensity, cfg.path_loss_exponent, cfg.sir_threshold,
                               cfg.ring_radii[static_cast<std::size_t>(ring)],
                               cfg.ring_radii[static_cast<std::size_t>(ring) + 1]);
}

ConnectionBounds connection_prob(double d_km, double p, const PhyConfig& cfg, const ConnectionOptions& opts) {
    const double snr = snr_success(d_km, cfg);
    const double sir = sir_success(d_km, p, cfg);
    ConnectionBounds out{snr * sir, std::numeric_limits<double>::quiet_NaN()};
    if (!opts.upper) return out;
    if (opts.samples < 1) throw ConfigError("connection.samples", "need at least one Monte Carlo sample");

    const int ring = ring_for_distance(d_km, cfg);
    const double inner = cfg.ring_radii[static_cast<std::size_t>(ring)];
    const double outer = cfg.ring_radii[static_cast<std::size_t>(ring) + 1];
    const double d = std::max(d_km, kMinDistanceKm);
    const double eta = cfg.path_loss_exponent;
    const double mean_count = p * cfg.intensity * std::numbers::pi * (outer * outer - inner * inner);

    Rng rng(opts.seed, 0xc0ffee);
    std::poisson_distribution<long long> count(mean_count > 0 ? mean_count : 1.0);
    double correction = 0.0;
    for (int s = 0; s < opts.samples; ++s) {
        const long long n = mean_count > 0 ? count(rng.engine()) : 0;
        double scaled = 0.0;  // wp * I / (P_T g(d))
        for (long long k = 0; k < n; ++k) {
            const double r = std::sqrt(inner * inner + rng.uniform() * (outer * outer - inner * inner));
            scaled += rng.exponential() * std::pow(d / std::max(r, kMinDistanceKm), eta);
        }
        const double y = std::exp(-cfg.sir_threshold * scaled);
        correction += std::min(snr, y) - snr * y;
    }
    out.upper = std::min(1.0, out.lower + correction / opts.samples);
    return out;
}

CoverageProfile coverage_profile(const PhyConfig& cfg, const ChargingScheme& scheme,
                                 const std::array<double, kNumRings>& outage_per_ring, const CoverageOptions& opts) {
    std::vector<double> distances = opts.distances;
    if (distances.empty()) {
        if (opts.points < 1) throw ConfigError("coverage.points", "need at least one distance sample");
        for (int k = 1; k <= opts.points; ++k) distances.push_back(cfg.disk_radius * k / opts.points);
    }

    std::array<double, kNumRings> avail{};
    std::array<double, kNumRings> collision{};
    for (int n = 0; n < kNumRings; ++n) {
        const double out = outage_per_ring[static_cast<std::size_t>(n)];
        if (!(out >= 0.0 && out <= 1.0)) throw OutOfRangeError("energy outage must lie in [0, 1]");
        avail[static_cast<std::size_t>(n)] = 1.0 - out;
        collision[static_cast<std::size_t>(n)] =
            collision_fraction(1.0 - out, scheme, sf_table()[static_cast<std::size_t>(n)].airtime, opts.duty);
    }

    CoverageProfile profile;
    profile.points.reserve(distances.size());
    for (double d : distances) {
        const int ring = ring_for_distance(d, cfg);
        const auto n = static_cast<std::size_t>(ring);
        CoveragePoint pt{};
        pt.distance = d;
        pt.ring = ring;
        pt.sf = sf_table()[n].sf;
        pt.energy_avail = avail[n];
        pt.collision_fraction = collision[n];
        pt.snr = snr_success(d, cfg);
        pt.sir = sir_success(d, pt.collision_fraction, cfg);
        pt.conn_lower = pt.snr * pt.sir;
        pt.conn_upper = std::numeric_limits<double>::quiet_NaN();
        if (opts.upper) pt.conn_upper = connection_prob(d, pt.collision_fraction, cfg, opts.connection).upper;
        pt.overall = pt.energy_avail * pt.conn_lower;
        profile.points.push_back(pt);
    }
    return profile;
}

Device make_device(double x_km, double y_km, const PhyConfig& cfg) {
    Device dev{};
    dev.x = x_km;
    dev.y = y_km;
    dev.distance = std::hypot(x_km, y_km);
    dev.ring = ring_for_distance(std::min(dev.distance, cfg.ring_radii[kNumRings]), cfg);
    const auto& entry = sf_table()[static_cast<std::size_t>(dev.ring)];
    dev.sf = entry.sf;
    dev.airtime = entry.airtime;
    return dev;
}

NetworkRealization sample_network(const PhyConfig& cfg, std::uint64_t seed) {
    NetworkRealization net;
    const double mean = cfg.intensity * std::numbers::pi * cfg.disk_radius * cfg.disk_radius;
    if (!(mean > 0.0)) return net;
    Rng rng(seed, 0x9e3779b9);
    std::poisson_distribution<long long> count(mean);
    const long long n = count(rng.engine());
    net.devices.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double r = cfg.disk_radius * std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        net.devices.push_back(make_device(r * std::cos(theta), r * std::sin(theta), cfg));
    }
    return net;
}

void add_ring_probes(NetworkRealization& net, const PhyConfig& cfg, int per_ring) {
    for (int n = 0; n < kNumRings; ++n) {
        const double mid = 0.5 * (cfg.ring_radii[static_cast<std::size_t>(n)] + cfg.ring_radii[static_cast<std::size_t>(n) + 1]);
        for (int k = 0; k < per_ring; ++k) {
            const double theta = 2.0 * std::numbers::pi * (k + 0.5) / per_ring;
            Device dev = make_device(mid * std::cos(theta), mid * std::sin(theta), cfg);
            dev.probe = true;
            net.devices.push_back(dev);
        }
    }
}

}  // namespace ehlora
