#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ehlora/act.hpp"
#include "ehlora/capacitor.hpp"
#include "ehlora/geometry.hpp"
#include "ehlora/markov.hpp"
#include "ehlora/montecarlo.hpp"

namespace ehlora::csv {

// Numbers are written with up to 10 significant digits, '.' decimal point.
std::string num(double x);

// time_s,voltage_V,phase,cycle_index
void write_trajectory(std::ostream& os, const VoltageTrajectory& traj);

// voltage_V,pdf,cdf
void write_stationary(std::ostream& os, const StationaryDistribution& sd);

// M,outage
void write_convergence(std::ostream& os, const std::vector<ConvergencePoint>& points);

struct SweepRow {
    int sf;
    double airtime;
    ChargingKind scheme;
    double mean_nu;
    double expected_decay;
    double estimator_mean;
    double markov_mean;
    double outage;
};

// sf,airtime_s,scheme,mean_nu_s,expected_decay,estimator_mean_V,markov_mean_V,outage
void write_outage_sweep(std::ostream& os, const std::vector<SweepRow>& rows);

// Ring-level Monte Carlo cross-check appended to coverage rows.
struct CoverageCheck {
    double q_hat;
    double half_width;
};

// distance_km,sf,snr_success,sir_success,conn_lower,energy_avail,overall_Q
// then conn_upper when `with_upper`, then mc_Q_hat,mc_ci_half_width when
// `checks` is non-empty (indexed by 0-based ring).
void write_coverage(std::ostream& os, const CoverageProfile& profile, bool with_upper,
                    const std::vector<CoverageCheck>& checks = {});

// sf,dist_kind,param_a_or_k,param_b_or_w,mean_nu_s,duty_cycle,predicted_mean_V,predicted_outage
void write_act_plan(std::ostream& os, const ActPlan& plan);

// sf,voltage_V,pdf for every entry holding a stationary distribution.
void write_act_pdfs(std::ostream& os, const ActPlan& plan);

// ring,attempts,energy_skips,snr_fails,sir_fails,successes,E_hat,C_hat,Q_hat,ci_half_width
void write_sim_rings(std::ostream& os, const SimReport& report);

// device,x_km,y_km,distance_km,ring,sf,probe,cycles,energy_skips,attempts,snr_fails,sir_fails,successes
void write_sim_devices(std::ostream& os, const SimReport& report);

// ring,cycles,p_hat,p_std_err,per_cycle_mean,per_cycle_std_err; rings with too
// few cycles are written with empty estimate fields.
void write_collision(std::ostream& os, const SimReport& report);

}  // namespace ehlora::csv
