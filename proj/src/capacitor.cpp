#include "ehlora/capacitor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ehlora/error.hpp"
#include "ehlora/markov.hpp"

namespace ehlora {

std::string_view to_string(CapacitorMode mode) { return mode == CapacitorMode::Literal ? "literal" : "thevenin"; }

CapacitorMode capacitor_mode_from_string(std::string_view s) {
    if (s == "literal") return CapacitorMode::Literal;
    if (s == "thevenin") return CapacitorMode::Thevenin;
    throw ConfigError("capacitor.mode", "expected 'literal' or 'thevenin', got '" + std::string(s) + "'");
}

std::string_view to_string(Phase phase) { return phase == Phase::Charge ? "charge" : "tx"; }

CapacitorModel build_model(const PhyConfig& cfg, CapacitorMode mode) {
    const double vh = cfg.harvester_voltage;
    const double rh = cfg.harvester_resistance();
    const double c = cfg.capacitance;
    CapacitorModel m{};
    m.mode = mode;
    if (mode == CapacitorMode::Literal) {
        m.v_inf_off = cfg.load_off * vh / rh;
        m.tau_off = cfg.load_off * c;
        m.v_inf_on = cfg.load_on * vh / rh;
        m.tau_on = cfg.load_on * c;
    } else {
        m.v_inf_off = vh * cfg.load_off / (rh + cfg.load_off);
        m.tau_off = rh * cfg.load_off / (rh + cfg.load_off) * c;
        m.v_inf_on = vh * cfg.load_on / (rh + cfg.load_on);
        m.tau_on = rh * cfg.load_on / (rh + cfg.load_on) * c;
    }
    if (!(m.v_inf_on < m.v_inf_off) || !(m.tau_on < m.tau_off)) {
        throw ModelError("capacitor model requires the radio-ON state to discharge below and faster than OFF");
    }
    return m;
}

CycleConstants cycle_constants(const CapacitorModel& m, double airtime) {
    if (airtime < 0) throw OutOfRangeError("airtime must be non-negative");
    CycleConstants cc{};
    cc.airtime = airtime;
    cc.c2 = std::exp(-airtime / m.tau_on);
    cc.c3 = m.v_inf_off;
    cc.c1 = m.v_inf_on + (cc.c3 - m.v_inf_on) * cc.c2;
    return cc;
}

double step_charge(double v0, double nu, const CapacitorModel& m) {
    return m.v_inf_off + (v0 - m.v_inf_off) * std::exp(-nu / m.tau_off);
}

double step_discharge(double v0, double airtime, const CapacitorModel& m) {
    return m.v_inf_on + (v0 - m.v_inf_on) * std::exp(-airtime / m.tau_on);
}

double cycle_voltage(double v0, double nu, double airtime, double t, const CapacitorModel& m) {
    const double e_off = std::exp(-std::min(t, nu) / m.tau_off);
    const double v_charge = m.v_inf_off * (1.0 - e_off) + v0 * e_off;
    if (t <= nu) return v_charge;
    const double e_on = std::exp(-(std::min(t, nu + airtime) - nu) / m.tau_on);
    return m.v_inf_on * (1.0 - e_on) + v_charge * e_on;
}

std::vector<double> VoltageTrajectory::end_of_cycle() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].marker == Marker::ChargeStart) out.push_back(samples[i].voltage);
    }
    return out;
}

VoltageTrajectory simulate_trajectory(double v0, const ChargingScheme& scheme, double airtime,
                                      std::size_t n_cycles, std::uint64_t seed, const CapacitorModel& m,
                                      const TrajectoryOptions& opts) {
    if (opts.samples_per_phase < 1) throw ConfigError("samples_per_phase", "must be at least 1");
    const int per_phase = opts.samples_per_phase;
    Rng rng(seed);
    VoltageTrajectory traj;
    traj.samples.reserve(1 + n_cycles * 2 * static_cast<std::size_t>(per_phase));
    traj.charging_times.reserve(n_cycles);
    traj.samples.push_back({0.0, v0, Phase::Charge, 0, Marker::ChargeStart});

    double t0 = 0.0;
    double v = v0;
    for (std::size_t c = 0; c < n_cycles; ++c) {
        const double nu = scheme.sample(rng);
        traj.charging_times.push_back(nu);
        for (int j = 1; j < per_phase; ++j) {
            const double dt = nu * j / per_phase;
            traj.samples.push_back({t0 + dt, step_charge(v, dt, m), Phase::Charge, c, Marker::None});
        }
        const double v_charged = step_charge(v, nu, m);
        traj.samples.push_back({t0 + nu, v_charged, Phase::Tx, c, Marker::TxStart});
        for (int j = 1; j < per_phase; ++j) {
            const double dt = airtime * j / per_phase;
            traj.samples.push_back({t0 + nu + dt, step_discharge(v_charged, dt, m), Phase::Tx, c, Marker::None});
        }
        v = step_discharge(v_charged, airtime, m);
        t0 += nu + airtime;
        traj.samples.push_back({t0, v, Phase::Charge, c + 1, Marker::ChargeStart});
    }
    return traj;
}

double estimate_mean_voltage(double expected_decay, const CycleConstants& cc) {
    const double denom = cc.c2 * expected_decay - 1.0;
    if (std::abs(denom) < 1e-12) throw NumericalError("mean-voltage estimator is singular (c2 E[X] = 1)");
    return (cc.c2 * cc.c3 * expected_decay - cc.c1) / denom;
}

double estimate_mean_voltage(const ChargingScheme& scheme, const CycleConstants& cc, const CapacitorModel& m) {
    return estimate_mean_voltage(expected_decay_factor(DecayFactorDistribution{scheme, m.tau_off}), cc);
}

}  // namespace ehlora
