#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ehlora/phy.hpp"

namespace ehlora {

// Distances below this are clamped before evaluating the path gain [km].
constexpr double kMinDistanceKm = 1e-3;

// g(d) = (psi / (4 pi d))^eta with psi and d both in meters.
double path_gain(double d_km, const PhyConfig& cfg);

// P[SNR >= q_SF] under Rayleigh fading, q_SF from the distance ring.
double snr_success(double d_km, const PhyConfig& cfg);

// P[SIR >= wp] with co-SF interferers forming a PPP of intensity p*lambda on
// the annulus (inner, outer]:
//   exp(-2 pi p lambda [G(outer) - G(inner)]),
//   G(x) = x^2/2 * 2F1(1, 2/eta; 1+2/eta; -x^eta / (wp d^eta)),
// the antiderivative of r / (1 + r^eta / (wp d^eta)).
double sir_success_annulus(double d_km, double p, double intensity, double eta, double wp, double inner_km,
                           double outer_km);

// Same, for a device inside its own SF ring.
double sir_success(double d_km, double p, const PhyConfig& cfg);

struct ConnectionBounds {
    double lower;
    double upper;  // NaN when not requested
};

struct ConnectionOptions {
    bool upper = true;
    int samples = 100000;
    std::uint64_t seed = 1;
};

// lower = snr_success * sir_success (independence bound).
// upper = P[|h|^2 >= max(N q / (P_T g), wp I / (P_T g))], estimated by Monte
// Carlo over the interferer PPP. Computed as lower + E[min(a, y) - a y]
// (a = snr term, y = per-realisation SIR term) so that upper >= lower holds
// sample by sample.
ConnectionBounds connection_prob(double d_km, double p, const PhyConfig& cfg, const ConnectionOptions& opts = {});

struct CoveragePoint {
    double distance;
    int ring;
    int sf;
    double snr;
    double sir;
    double conn_lower;
    double conn_upper;  // NaN unless requested
    double energy_avail;
    double collision_fraction;
    double overall;
};

struct CoverageProfile {
    std::vector<CoveragePoint> points;
};

struct CoverageOptions {
    std::vector<double> distances;  // empty: `points` equally spaced over (0, R]
    int points = 120;
    DutyModel duty = DutyModel::PerCycleMean;
    bool upper = false;
    ConnectionOptions connection;
};

// Q(d) = E(d) C(d) with C the lower bound and p from the per-ring energy
// availability; `outage_per_ring` holds the energy-outage probability per ring.
CoverageProfile coverage_profile(const PhyConfig& cfg, const ChargingScheme& scheme,
                                 const std::array<double, kNumRings>& outage_per_ring,
                                 const CoverageOptions& opts = {});

struct Device {
    double x;  // [km]
    double y;  // [km]
    double distance;
    int ring;
    int sf;
    double airtime;
    bool probe = false;
};

struct NetworkRealization {
    std::vector<Device> devices;
};

Device make_device(double x_km, double y_km, const PhyConfig& cfg);

// N ~ Poisson(lambda pi R^2) devices uniformly on the disk.
NetworkRealization sample_network(const PhyConfig& cfg, std::uint64_t seed);

// Appends `per_ring` devices on the mid-radius circle of every ring, evenly
// spaced in angle. Marked as probes in reports; they transmit like any device.
void add_ring_probes(NetworkRealization& net, const PhyConfig& cfg, int per_ring);

}  // namespace ehlora
