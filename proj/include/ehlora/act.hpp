#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "ehlora/capacitor.hpp"
#include "ehlora/markov.hpp"
#include "ehlora/phy.hpp"

namespace ehlora {

enum class ActKind {
    ConstantDutyCycle,      // CDC: E[nu] = theta tau per SF
    VoltageEqualization,    // CVE: mean voltage = vartheta * V_op per SF
};

std::string_view to_string(ActKind k);
ActKind act_kind_from_string(std::string_view s);

// Solved b (Uniform) or w (Weibull) below this is rejected [s].
constexpr double kActFloorSeconds = 1.0;

struct ActOptions {
    // Fixed parameter of the family: a for Uniform, k for Weibull.
    double uniform_a = 0.0;
    double weibull_k = 1.0;
    CapacitorMode mode = CapacitorMode::Thevenin;
    MarkovOptions markov;
    bool keep_stationary = true;  // store the per-SF distributions in the plan
};

struct ActEntry {
    int sf;
    double airtime;
    ChargingScheme scheme = ChargingScheme::uniform(0.0, 1.0);
    double mean_nu;
    double duty_cycle;         // tau / (E[nu] + tau)
    bool etsi_ok;              // duty_cycle <= 1%
    double expected_decay;     // E[X]
    double predicted_mean;     // mean-voltage estimator [V]
    double markov_mean;        // stationary mean [V]
    double markov_stddev;      // [V]
    double predicted_outage;   // stationary P[v <= V_op]
    std::optional<StationaryDistribution> stationary;
};

struct ActPlan {
    ActKind kind;
    ChargingKind dist;
    double target;  // theta or vartheta
    std::array<ActEntry, kNumRings> entries;
};

ActPlan plan_cdc(double theta, ChargingKind dist, const PhyConfig& cfg, const ActOptions& opts = {});

// Throws InfeasibleError naming the SF when the target decay factor falls
// outside (0, 1) or the solved parameter is below kActFloorSeconds.
ActPlan plan_cve(double vartheta, ChargingKind dist, const PhyConfig& cfg, const ActOptions& opts = {});

// Required E[X] for a mean end-of-cycle voltage `target_v`.
double cve_target_decay(double target_v, const CycleConstants& cc);

}  // namespace ehlora
