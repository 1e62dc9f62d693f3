#include <catch_amalgamated.hpp>

#include <boost/numeric/odeint.hpp>

#include "ehlora/capacitor.hpp"
#include "ehlora/error.hpp"

using namespace ehlora;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Circuit ODE C dv/dt = (V_H - v)/R_H - v/R_L integrated numerically.
double integrate_circuit(double v0, double t, double r_load, const PhyConfig& cfg) {
    namespace odeint = boost::numeric::odeint;
    const double rh = cfg.harvester_resistance();
    double v = v0;
    auto rhs = [&](const double& x, double& dxdt, double) {
        dxdt = ((cfg.harvester_voltage - x) / rh - x / r_load) / cfg.capacitance;
    };
    odeint::integrate_adaptive(odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<double>()), rhs, v,
                               0.0, t, t / 1000.0);
    return v;
}

}  // namespace

TEST_CASE("Thevenin constants for the reference circuit") {
    const PhyConfig cfg;
    const auto m = build_model(cfg);
    CHECK_THAT(cfg.harvester_resistance(), WithinRel(10890.0, 1e-12));
    CHECK_THAT(m.v_inf_off, WithinAbs(3.2412, 1e-4));
    CHECK_THAT(m.tau_off, WithinAbs(106.96, 1e-2));
    CHECK_THAT(m.v_inf_on, WithinAbs(0.035077, 1e-6));
    CHECK_THAT(m.tau_on, WithinAbs(1.157563, 1e-6));
}

TEST_CASE("literal constants exceed the source voltage") {
    const auto m = build_model(PhyConfig{}, CapacitorMode::Literal);
    CHECK_THAT(m.v_inf_off, WithinAbs(181.82, 0.01));
    CHECK(m.tau_off == 600e3 * 10e-3);
    CHECK_THAT(m.v_inf_on, WithinRel(117.0 * 3.3 / 10890.0, 1e-14));
}

TEST_CASE("phase updates match the circuit ODE") {
    const PhyConfig cfg;
    const auto m = build_model(cfg);
    for (double v0 : {0.0, 1.2, 1.8, 3.0}) {
        for (double nu : {0.5, 10.0, 50.0, 400.0}) {
            CHECK_THAT(step_charge(v0, nu, m), WithinAbs(integrate_circuit(v0, nu, cfg.load_off, cfg), 1e-9));
        }
        for (double tau : {0.0366, 0.204, 0.682}) {
            CHECK_THAT(step_discharge(v0, tau, m), WithinAbs(integrate_circuit(v0, tau, cfg.load_on, cfg), 1e-9));
        }
    }
}

TEST_CASE("one cycle is a contraction with factor c2 exp(-nu/tau_off)") {
    const auto m = build_model(PhyConfig{});
    const auto cc = cycle_constants(m, 0.204);
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double v = 0.1 + 3.0 * rng.uniform();
        const double w = 0.1 + 3.0 * rng.uniform();
        const double nu = 200.0 * rng.uniform_open();
        const double lhs = std::abs(step_discharge(step_charge(v, nu, m), 0.204, m) -
                                    step_discharge(step_charge(w, nu, m), 0.204, m));
        const double rhs = cc.c2 * std::exp(-nu / m.tau_off) * std::abs(v - w);
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-12));
        CHECK(lhs < std::abs(v - w));
        // The recursion constants reproduce the chained update.
        const double x = std::exp(-nu / m.tau_off);
        CHECK_THAT(cc.c1 + cc.c2 * x * (v - cc.c3), WithinAbs(step_discharge(step_charge(v, nu, m), 0.204, m), 1e-12));
    }
}

TEST_CASE("monotonicity of the phase updates") {
    const auto m = build_model(PhyConfig{});
    double prev = step_charge(1.0, 0.0, m);
    for (double nu = 1.0; nu < 500.0; nu += 7.0) {
        const double v = step_charge(1.0, nu, m);
        CHECK(v > prev);
        prev = v;
    }
    prev = step_discharge(2.5, 0.0, m);
    for (double tau = 0.01; tau < 2.0; tau += 0.05) {
        const double v = step_discharge(2.5, tau, m);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("chained update equals the piecewise closed form") {
    const auto m = build_model(PhyConfig{});
    for (double v0 : {0.5, 1.8, 3.1}) {
        for (double nu : {1.0, 50.0, 300.0}) {
            const double tau = 0.372;
            CHECK_THAT(cycle_voltage(v0, nu, tau, nu, m), WithinAbs(step_charge(v0, nu, m), 1e-12));
            CHECK_THAT(cycle_voltage(v0, nu, tau, nu + tau, m),
                       WithinAbs(step_discharge(step_charge(v0, nu, m), tau, m), 1e-12));
        }
    }
}

TEST_CASE("trajectories stay inside the asymptotes") {
    const auto m = build_model(PhyConfig{});
    for (const auto& s : {ChargingScheme::uniform(0.0, 100.0), ChargingScheme::weibull(1.0, 50.0)}) {
        const auto traj = simulate_trajectory(1.8, s, 0.204, 100000, 3, m, {1});
        for (const auto& p : traj.samples) {
            REQUIRE(p.voltage >= m.v_inf_on);
            REQUIRE(p.voltage <= m.v_inf_off);
        }
    }
}

TEST_CASE("trajectory layout") {
    const auto m = build_model(PhyConfig{});
    const auto s = ChargingScheme::uniform(0.0, 100.0);

    const auto empty = simulate_trajectory(1.8, s, 0.204, 0, 1, m);
    REQUIRE(empty.samples.size() == 1);
    CHECK(empty.samples[0].voltage == 1.8);
    CHECK(empty.end_of_cycle().empty());

    const auto traj = simulate_trajectory(1.8, s, 0.204, 5, 1, m, {4});
    CHECK(traj.samples.size() == 1 + 5 * 2 * 4);
    CHECK(traj.charging_times.size() == 5);
    const auto ends = traj.end_of_cycle();
    REQUIRE(ends.size() == 5);
    double v = 1.8;
    for (std::size_t c = 0; c < 5; ++c) {
        v = step_discharge(step_charge(v, traj.charging_times[c], m), 0.204, m);
        CHECK(ends[c] == v);
    }
    for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].time > traj.samples[i - 1].time);

    // Same seed, same path.
    const auto again = simulate_trajectory(1.8, s, 0.204, 5, 1, m, {4});
    CHECK(again.charging_times == traj.charging_times);
    CHECK_THROWS_AS(simulate_trajectory(1.8, s, 0.204, 5, 1, m, {0}), ConfigError);
}

TEST_CASE("mean-voltage estimator") {
    const auto m = build_model(PhyConfig{});
    const auto cc = cycle_constants(m, 0.204);
    // Fixed point of the mean recursion.
    const double ex = 0.7;
    const double mean = estimate_mean_voltage(ex, cc);
    CHECK_THAT(cc.c1 + cc.c2 * ex * (mean - cc.c3), WithinAbs(mean, 1e-12));
    CHECK_THROWS_AS(estimate_mean_voltage(1.0 / cc.c2, cc), NumericalError);
}
