#include <catch_amalgamated.hpp>

#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ehlora/error.hpp"
#include "ehlora/geometry.hpp"

using namespace ehlora;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// exp(-2 pi p lambda \int_lo^hi r / (1 + r^eta / (wp d^eta)) dr)
double sir_oracle(double d, double p, double lambda, double eta, double wp, double lo, double hi) {
    auto f = [&](double r) { return r / (1.0 + std::pow(r / d, eta) / wp); };
    const double integral = boost::math::quadrature::tanh_sinh<double>().integrate(f, lo, hi, 1e-15);
    return std::exp(-2.0 * std::numbers::pi * p * lambda * integral);
}

}  // namespace

TEST_CASE("path gain and SNR success") {
    PhyConfig cfg;
    CHECK_THAT(path_gain(1.0, cfg), WithinRel(std::pow(0.345 / (4.0 * std::numbers::pi * 1000.0), 2.75), 1e-14));
    CHECK_THROWS_AS(path_gain(0.0, cfg), OutOfRangeError);
    const double d = 3.5;
    const double expected = std::exp(-cfg.noise * sf_entry(10).snr_threshold / (cfg.tx_power * path_gain(d, cfg)));
    CHECK_THAT(snr_success(d, cfg), WithinRel(expected, 1e-14));
    CHECK(std::isfinite(snr_success(0.0, cfg)));
    CHECK_THAT(snr_success(0.0, cfg), WithinAbs(1.0, 1e-6));
    cfg.noise = 0.0;
    CHECK(snr_success(5.0, cfg) == 1.0);
    // The SF steps up at every ring boundary, so success jumps up there.
    PhyConfig ref;
    CHECK(snr_success(3.0001, ref) > snr_success(3.0, ref));
}

TEST_CASE("SIR closed form against quadrature") {
    PhyConfig cfg;
    for (double eta : {2.0, 2.75, 4.0}) {
        for (double d : {0.2, 1.5, 3.7, 5.9}) {
            for (double p : {0.001, 0.05, 0.3}) {
                const double lo = std::floor(d), hi = lo + 1.0;
                CHECK_THAT(sir_success_annulus(d, p, 5.0, eta, cfg.sir_threshold, lo, hi),
                           WithinRel(sir_oracle(d, p, 5.0, eta, cfg.sir_threshold, lo, hi), 1e-9));
            }
        }
    }
    CHECK(sir_success(2.5, 0.0, cfg) == 1.0);
    cfg.intensity = 0.0;
    CHECK(sir_success(2.5, 0.3, cfg) == 1.0);
    CHECK_THROWS_AS(sir_success(2.5, 1.5, PhyConfig{}), OutOfRangeError);
}

TEST_CASE("SIR success falls with p and lambda") {
    PhyConfig cfg;
    double prev = 1.0;
    for (double p : {0.01, 0.02, 0.05, 0.1}) {
        const double s = sir_success(2.5, p, cfg);
        CHECK(s < prev);
        prev = s;
    }
    PhyConfig dense = cfg;
    dense.intensity = 20.0;
    CHECK(sir_success(2.5, 0.05, dense) < sir_success(2.5, 0.05, cfg));
}

TEST_CASE("connection bounds bracket a direct simulation of the joint event") {
    PhyConfig cfg;
    cfg.intensity = 8.0;
    const double d = 3.6, p = 0.05;
    ConnectionOptions opts;
    opts.samples = 200000;
    opts.seed = 11;
    const auto b = connection_prob(d, p, cfg, opts);
    CHECK(b.upper >= b.lower);
    CHECK_THAT(b.lower, WithinRel(snr_success(d, cfg) * sir_success(d, p, cfg), 1e-14));

    // Oracle: draw the fading and the interferer field, test both thresholds.
    Rng rng(99, 5);
    const double lo = 3.0, hi = 4.0;
    const double mean = p * cfg.intensity * std::numbers::pi * (hi * hi - lo * lo);
    std::poisson_distribution<int> count(mean);
    const double g = path_gain(d, cfg);
    const double snr_need = cfg.noise * sf_entry(10).snr_threshold / (cfg.tx_power * g);
    const int n = 200000;
    int ok = 0;
    for (int i = 0; i < n; ++i) {
        double interference = 0.0;
        const int k = count(rng.engine());
        for (int j = 0; j < k; ++j) {
            const double r = std::sqrt(lo * lo + rng.uniform() * (hi * hi - lo * lo));
            interference += rng.exponential() * path_gain(r, cfg);
        }
        const double h = rng.exponential();
        ok += (h >= snr_need && h * g >= cfg.sir_threshold * interference) ? 1 : 0;
    }
    const double q = static_cast<double>(ok) / n;
    const double se = std::sqrt(q * (1 - q) / n);
    CHECK(std::abs(b.upper - q) < 4.0 * se + 1e-3);
    CHECK(b.lower <= q + 4.0 * se);
}

TEST_CASE("coverage profile") {
    PhyConfig cfg;
    const auto s = ChargingScheme::uniform(0.0, 100.0);
    const std::array<double, kNumRings> outage{0.0, 0.0, 0.0001, 0.085, 0.8, 1.0};
    const auto prof = coverage_profile(cfg, s, outage, {.distances = {0.5, 3.5, 4.5, 5.5}});
    REQUIRE(prof.points.size() == 4);
    for (const auto& pt : prof.points) {
        CHECK_THAT(pt.overall, WithinRel(pt.energy_avail * pt.conn_lower, 1e-15));
        CHECK_THAT(pt.conn_lower, WithinRel(pt.snr * pt.sir, 1e-15));
        CHECK(std::isnan(pt.conn_upper));
    }
    CHECK(prof.points[1].sf == 10);
    CHECK_THAT(prof.points[1].energy_avail, WithinAbs(0.915, 1e-15));
    CHECK_THAT(prof.points[1].collision_fraction, WithinRel(0.915 * duty_cycle(s, 0.204).expected, 1e-12));
    CHECK(prof.points[3].overall == 0.0);
    CHECK(prof.points[3].sir == 1.0);

    PhyConfig empty = cfg;
    empty.intensity = 0.0;
    for (const auto& pt : coverage_profile(empty, s, outage, {.points = 30}).points) {
        CHECK(pt.conn_lower == pt.snr);
    }
    CHECK(coverage_profile(cfg, s, outage).points.size() == 120);
}

TEST_CASE("PPP device count has mean lambda pi R^2") {
    PhyConfig cfg;
    cfg.intensity = 2.0;
    const double mean = 2.0 * std::numbers::pi * 36.0;
    const int seeds = 3000;
    double sum = 0.0;
    for (int s = 0; s < seeds; ++s) sum += static_cast<double>(sample_network(cfg, static_cast<std::uint64_t>(s)).devices.size());
    CHECK(std::abs(sum / seeds - mean) < 4.0 * std::sqrt(mean / seeds));
    cfg.intensity = 0.0;
    CHECK(sample_network(cfg, 1).devices.empty());
}

TEST_CASE("devices are uniform on the disk") {
    PhyConfig cfg;
    std::array<double, kNumRings> counts{};
    double total = 0.0;
    for (int s = 0; s < 200; ++s) {
        for (const auto& dev : sample_network(cfg, static_cast<std::uint64_t>(s)).devices) {
            REQUIRE(dev.distance <= 6.0);
            REQUIRE(dev.ring == ring_for_distance(dev.distance, cfg));
            REQUIRE(dev.sf == 7 + dev.ring);
            counts[static_cast<std::size_t>(dev.ring)] += 1.0;
            total += 1.0;
        }
    }
    double chi2 = 0.0;
    for (int n = 0; n < kNumRings; ++n) {
        const double expected = total * (2.0 * n + 1.0) / 36.0;
        chi2 += std::pow(counts[static_cast<std::size_t>(n)] - expected, 2) / expected;
    }
    const boost::math::chi_squared_distribution<double> dist(kNumRings - 1);
    CHECK(chi2 < boost::math::quantile(dist, 0.999));
}

TEST_CASE("ring probes") {
    PhyConfig cfg;
    NetworkRealization net;
    add_ring_probes(net, cfg, 3);
    REQUIRE(net.devices.size() == 18);
    for (std::size_t i = 0; i < net.devices.size(); ++i) {
        const auto& dev = net.devices[i];
        CHECK(dev.probe);
        CHECK(dev.ring == static_cast<int>(i / 3));
        CHECK_THAT(dev.distance, WithinAbs(dev.ring + 0.5, 1e-12));
    }
}
