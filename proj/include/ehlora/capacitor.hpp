#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ehlora/phy.hpp"

namespace ehlora {

// How the harvester/load network is reduced to a first-order RC response.
//  Literal:  V_inf = R_L V_H / R_H,             tau = R_L C
//  Thevenin: V_inf = V_H R_L / (R_H + R_L),     tau = (R_H || R_L) C
// With realistic loads the Literal charging asymptote exceeds V_H by orders
// of magnitude.
enum class CapacitorMode { Literal, Thevenin };

std::string_view to_string(CapacitorMode mode);
CapacitorMode capacitor_mode_from_string(std::string_view s);

struct CapacitorModel {
    double v_inf_off;  // charging asymptote, radio OFF [V]
    double tau_off;    // charging time constant [s]
    double v_inf_on;   // discharge asymptote, radio ON [V]
    double tau_on;     // discharge time constant [s]
    CapacitorMode mode;
};

CapacitorModel build_model(const PhyConfig& cfg, CapacitorMode mode = CapacitorMode::Thevenin);

// Per-SF constants of the end-of-cycle recursion
//   v_{2n+2} = c1 + c2 X (v_{2n} - c3),  X = exp(-nu / tau_off).
struct CycleConstants {
    double c1;
    double c2;
    double c3;
    double airtime;
};

CycleConstants cycle_constants(const CapacitorModel& m, double airtime);

double step_charge(double v0, double nu, const CapacitorModel& m);
double step_discharge(double v0, double airtime, const CapacitorModel& m);

// Piecewise RC response over one cycle starting at v0: charge on [0, nu],
// transmit on (nu, nu + airtime]. Written in the V_inf (1 - e) + V(0) e form.
double cycle_voltage(double v0, double nu, double airtime, double t, const CapacitorModel& m);

enum class Phase { Charge, Tx };
enum class Marker { None, ChargeStart, TxStart };

std::string_view to_string(Phase phase);

struct TrajectorySample {
    double time;
    double voltage;
    Phase phase;
    std::size_t cycle;
    Marker marker;
};

struct VoltageTrajectory {
    std::vector<TrajectorySample> samples;
    std::vector<double> charging_times;  // nu drawn for each cycle

    // Voltage at the end of every completed cycle (post-discharge states).
    std::vector<double> end_of_cycle() const;
};

struct TrajectoryOptions {
    int samples_per_phase = 20;
};

// Alternating charge(nu ~ scheme) / transmit(airtime) cycles from v0. The
// last sample of each phase is the exact closed-form end-of-phase voltage.
VoltageTrajectory simulate_trajectory(double v0, const ChargingScheme& scheme, double airtime,
                                      std::size_t n_cycles, std::uint64_t seed, const CapacitorModel& m,
                                      const TrajectoryOptions& opts = {});

// Mean end-of-cycle voltage from E[X]: (c2 c3 E[X] - c1) / (c2 E[X] - 1).
double estimate_mean_voltage(double expected_decay, const CycleConstants& cc);
double estimate_mean_voltage(const ChargingScheme& scheme, const CycleConstants& cc, const CapacitorModel& m);

}  // namespace ehlora
