#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ehlora/capacitor.hpp"
#include "ehlora/geometry.hpp"
#include "ehlora/phy.hpp"

namespace ehlora {

// Which same-ring transmissions count as interferers for a victim.
enum class OverlapMode {
    Instant,     // active at the victim's start instant, full power
    AnyOverlap,  // any time overlap, full power
    Fractional,  // any time overlap, power weighted by overlap / airtime
};

// What happens to a cycle whose energy is insufficient.
enum class EnergyRule {
    // The transmission always drains the capacitor; the cycle is an energy
    // outage when the post-transmission voltage is at or below the operating
    // voltage. This is the event the Markov chain measures.
    CompletionCheck,
    // The attempt is dropped without discharging when the voltage at the end
    // of charging is below the operating voltage.
    SkipBelowThreshold,
};

std::string_view to_string(OverlapMode m);
OverlapMode overlap_mode_from_string(std::string_view s);
std::string_view to_string(EnergyRule r);
EnergyRule energy_rule_from_string(std::string_view s);

struct SimOptions {
    OverlapMode overlap = OverlapMode::Instant;
    EnergyRule energy_rule = EnergyRule::CompletionCheck;
    double warmup = -1.0;  // seconds discarded before counting; negative: 100 E[nu]
    int threads = 1;
    CapacitorMode mode = CapacitorMode::Thevenin;
    double ci_z = 3.0;
};

struct DeviceReport {
    std::size_t index;
    Device device;
    std::uint64_t cycles = 0;        // transmission opportunities in the window
    std::uint64_t energy_skips = 0;  // energy outages
    std::uint64_t attempts = 0;      // cycles - energy_skips
    std::uint64_t snr_fails = 0;
    std::uint64_t sir_fails = 0;
    std::uint64_t successes = 0;
};

// Binomial proportion with a normal-approximation half-width.
struct Proportion {
    double value = 0.0;
    double half_width = 0.0;
    std::uint64_t trials = 0;
};

struct RingReport {
    int ring = 0;
    int sf = 0;
    std::size_t devices = 0;
    std::uint64_t cycles = 0;
    std::uint64_t energy_skips = 0;
    std::uint64_t attempts = 0;
    std::uint64_t snr_fails = 0;
    std::uint64_t sir_fails = 0;
    std::uint64_t successes = 0;

    Proportion energy;      // E hat: available / cycles
    Proportion connection;  // C hat: successes / attempts
    Proportion overall;     // Q hat: successes / cycles

    // Same counts restricted to probe devices.
    std::uint64_t probe_cycles = 0;
    std::uint64_t probe_energy_skips = 0;
    std::uint64_t probe_successes = 0;
    Proportion probe_overall;

    // Per-cycle sums for the time-fraction estimator. a = airtime when the
    // cycle is energy-capable else 0, T = cycle length.
    double sum_a = 0.0;
    double sum_t = 0.0;
    double sum_aa = 0.0;
    double sum_tt = 0.0;
    double sum_at = 0.0;
    double sum_ratio = 0.0;   // a / T
    double sum_ratio2 = 0.0;  // (a / T)^2
};

struct SimReport {
    std::array<RingReport, kNumRings> rings;
    std::vector<DeviceReport> devices;
    double duration = 0.0;
    double warmup = 0.0;
    std::uint64_t seed = 0;
};

SimReport run_simulation(const NetworkRealization& net, const PhyConfig& cfg, const ChargingScheme& scheme,
                         double duration, std::uint64_t seed, const SimOptions& opts = {});

struct CollisionEstimate {
    int ring;
    std::uint64_t cycles;
    double p_hat;     // sum a / sum T over all devices of the ring
    double std_err;   // delta-method standard error of the ratio
    double per_cycle_mean;  // mean of a / T over cycles
    double per_cycle_std_err;
};

// Fraction of time spent transmitting while energy-capable, per ring.
// Throws StatisticsError when a ring has fewer than 100 cycles.
CollisionEstimate empirical_collision_fraction(const SimReport& report, int ring);
std::array<CollisionEstimate, kNumRings> empirical_collision_fraction(const SimReport& report);

// Capacitor history of one device as the simulator evolves it, for replay
// checks against the capacitor module. Cycles span warm-up and window.
struct DeviceCycle {
    double charge_start;
    double nu;
    double v_start;
    double v_charged;
    double v_end;
    bool transmitted;  // false only for SkipBelowThreshold drops
    bool capable;      // counted as energy-available
};

struct DeviceTrace {
    double initial_voltage;
    std::vector<DeviceCycle> cycles;
};

DeviceTrace trace_device(std::size_t index, const Device& dev, const PhyConfig& cfg, const ChargingScheme& scheme,
                         double duration, std::uint64_t seed, const SimOptions& opts = {});

}  // namespace ehlora
