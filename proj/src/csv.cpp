#include "ehlora/csv.hpp"

#include <fmt/format.h>

#include "ehlora/error.hpp"

namespace ehlora::csv {

std::string num(double x) { return fmt::format("{:.10g}", x); }

void write_trajectory(std::ostream& os, const VoltageTrajectory& traj) {
    os << "time_s,voltage_V,phase,cycle_index\n";
    for (const auto& s : traj.samples) {
        os << num(s.time) << ',' << num(s.voltage) << ',' << to_string(s.phase) << ',' << s.cycle << '\n';
    }
}

void write_stationary(std::ostream& os, const StationaryDistribution& sd) {
    os << "voltage_V,pdf,cdf\n";
    const auto pdf = stationary_pdf(sd);
    const auto cdf = sd.cdf();
    for (std::size_t k = 0; k < pdf.size(); ++k) {
        os << num(pdf[k].first) << ',' << num(pdf[k].second) << ',' << num(cdf[k]) << '\n';
    }
}

void write_convergence(std::ostream& os, const std::vector<ConvergencePoint>& points) {
    os << "M,outage\n";
    for (const auto& p : points) os << p.bins << ',' << num(p.outage) << '\n';
}

void write_outage_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "sf,airtime_s,scheme,mean_nu_s,expected_decay,estimator_mean_V,markov_mean_V,outage\n";
    for (const auto& r : rows) {
        os << r.sf << ',' << num(r.airtime) << ',' << (r.scheme == ChargingKind::Uniform ? "ud" : "wd") << ','
           << num(r.mean_nu) << ',' << num(r.expected_decay) << ',' << num(r.estimator_mean) << ','
           << num(r.markov_mean) << ',' << num(r.outage) << '\n';
    }
}

void write_coverage(std::ostream& os, const CoverageProfile& profile, bool with_upper,
                    const std::vector<CoverageCheck>& checks) {
    os << "distance_km,sf,snr_success,sir_success,conn_lower,energy_avail,overall_Q";
    if (with_upper) os << ",conn_upper";
    if (!checks.empty()) os << ",mc_Q_hat,mc_ci_half_width";
    os << '\n';
    for (const auto& p : profile.points) {
        os << num(p.distance) << ',' << p.sf << ',' << num(p.snr) << ',' << num(p.sir) << ',' << num(p.conn_lower)
           << ',' << num(p.energy_avail) << ',' << num(p.overall);
        if (with_upper) os << ',' << num(p.conn_upper);
        if (!checks.empty()) {
            const auto& c = checks.at(static_cast<std::size_t>(p.ring));
            os << ',' << num(c.q_hat) << ',' << num(c.half_width);
        }
        os << '\n';
    }
}

void write_act_plan(std::ostream& os, const ActPlan& plan) {
    os << "sf,dist_kind,param_a_or_k,param_b_or_w,mean_nu_s,duty_cycle,predicted_mean_V,predicted_outage\n";
    for (const auto& e : plan.entries) {
        os << e.sf << ',' << (e.scheme.kind() == ChargingKind::Uniform ? "ud" : "wd") << ',' << num(e.scheme.first())
           << ',' << num(e.scheme.second()) << ',' << num(e.mean_nu) << ',' << num(e.duty_cycle) << ','
           << num(e.predicted_mean) << ',' << num(e.predicted_outage) << '\n';
    }
}

void write_act_pdfs(std::ostream& os, const ActPlan& plan) {
    os << "sf,voltage_V,pdf\n";
    for (const auto& e : plan.entries) {
        if (!e.stationary) continue;
        for (const auto& [v, f] : stationary_pdf(*e.stationary)) os << e.sf << ',' << num(v) << ',' << num(f) << '\n';
    }
}

void write_sim_rings(std::ostream& os, const SimReport& report) {
    os << "ring,attempts,energy_skips,snr_fails,sir_fails,successes,E_hat,C_hat,Q_hat,ci_half_width\n";
    for (const auto& r : report.rings) {
        os << r.ring << ',' << r.attempts << ',' << r.energy_skips << ',' << r.snr_fails << ',' << r.sir_fails << ','
           << r.successes << ',' << num(r.energy.value) << ',' << num(r.connection.value) << ','
           << num(r.overall.value) << ',' << num(r.overall.half_width) << '\n';
    }
}

void write_sim_devices(std::ostream& os, const SimReport& report) {
    os << "device,x_km,y_km,distance_km,ring,sf,probe,cycles,energy_skips,attempts,snr_fails,sir_fails,successes\n";
    for (const auto& d : report.devices) {
        os << d.index << ',' << num(d.device.x) << ',' << num(d.device.y) << ',' << num(d.device.distance) << ','
           << d.device.ring + 1 << ',' << d.device.sf << ',' << (d.device.probe ? 1 : 0) << ',' << d.cycles << ','
           << d.energy_skips << ',' << d.attempts << ',' << d.snr_fails << ',' << d.sir_fails << ',' << d.successes
           << '\n';
    }
}

void write_collision(std::ostream& os, const SimReport& report) {
    os << "ring,cycles,p_hat,p_std_err,per_cycle_mean,per_cycle_std_err\n";
    for (int n = 0; n < kNumRings; ++n) {
        const auto& r = report.rings[static_cast<std::size_t>(n)];
        os << r.ring << ',' << r.cycles;
        try {
            const auto e = empirical_collision_fraction(report, n);
            os << ',' << num(e.p_hat) << ',' << num(e.std_err) << ',' << num(e.per_cycle_mean) << ','
               << num(e.per_cycle_std_err) << '\n';
        } catch (const StatisticsError&) {
            os << ",,,,\n";
        }
    }
}

}  // namespace ehlora::csv
