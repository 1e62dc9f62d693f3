#include "ehlora/act.hpp"

#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "ehlora/error.hpp"

namespace ehlora {

std::string_view to_string(ActKind k) { return k == ActKind::ConstantDutyCycle ? "cdc" : "cve"; }

ActKind act_kind_from_string(std::string_view s) {
    if (s == "cdc" || s == "CDC") return ActKind::ConstantDutyCycle;
    if (s == "cve" || s == "CVE") return ActKind::VoltageEqualization;
    throw ConfigError("act.kind", "expected cdc or cve, got '" + std::string(s) + "'");
}

double cve_target_decay(double target_v, const CycleConstants& cc) {
    return (target_v - cc.c1) / (cc.c2 * (target_v - cc.c3));
}

namespace {

ChargingScheme make_scheme(ChargingKind dist, double free_param, const ActOptions& opts) {
    return dist == ChargingKind::Uniform ? ChargingScheme::uniform(opts.uniform_a, free_param)
                                         : ChargingScheme::weibull(opts.weibull_k, free_param);
}

ActEntry evaluate(const SfEntry& sf, const ChargingScheme& scheme, const CapacitorModel& m, const PhyConfig& cfg,
                  const ActOptions& opts) {
    ActEntry e{};
    e.sf = sf.sf;
    e.airtime = sf.airtime;
    e.scheme = scheme;
    e.mean_nu = scheme.mean();
    e.duty_cycle = sf.airtime / (e.mean_nu + sf.airtime);
    e.etsi_ok = e.duty_cycle <= 0.01 * (1.0 + 1e-12);
    OutageAnalysis a = analyze_energy_outage(m, scheme, sf.airtime, cfg.operating_voltage, opts.markov);
    e.expected_decay = a.expected_decay;
    e.predicted_mean = a.estimator_mean;
    e.markov_mean = a.stationary.mean();
    e.markov_stddev = a.stationary.stddev();
    e.predicted_outage = a.outage;
    if (opts.keep_stationary) e.stationary = std::move(a.stationary);
    return e;
}

void check_family(const ActOptions& opts, ChargingKind dist) {
    if (dist == ChargingKind::Uniform && !(opts.uniform_a >= 0)) {
        throw ConfigError("act.uniform_a", "must be non-negative");
    }
    if (dist == ChargingKind::Weibull && !(opts.weibull_k > 0)) {
        throw ConfigError("act.weibull_k", "must be positive");
    }
}

}  // namespace

ActPlan plan_cdc(double theta, ChargingKind dist, const PhyConfig& cfg, const ActOptions& opts) {
    if (!(theta > 0)) throw OutOfRangeError("CDC multiplier theta must be positive");
    check_family(opts, dist);
    const CapacitorModel m = build_model(cfg, opts.mode);
    ActPlan plan{ActKind::ConstantDutyCycle, dist, theta, {}};
    for (int n = 0; n < kNumRings; ++n) {
        const SfEntry& sf = sf_table()[static_cast<std::size_t>(n)];
        const double mean = theta * sf.airtime;
        double free_param = 0.0;
        if (dist == ChargingKind::Uniform) {
            if (!(opts.uniform_a < mean)) {
                throw InfeasibleError(sf.sf, fmt::format("Uniform a = {} s is not below the required mean {} s",
                                                         opts.uniform_a, mean));
            }
            free_param = 2.0 * mean - opts.uniform_a;
        } else {
            free_param = mean / std::tgamma(1.0 + 1.0 / opts.weibull_k);
        }
        plan.entries[static_cast<std::size_t>(n)] = evaluate(sf, make_scheme(dist, free_param, opts), m, cfg, opts);
    }
    return plan;
}

ActPlan plan_cve(double vartheta, ChargingKind dist, const PhyConfig& cfg, const ActOptions& opts) {
    if (!(vartheta > 0)) throw OutOfRangeError("CVE multiplier vartheta must be positive");
    check_family(opts, dist);
    const CapacitorModel m = build_model(cfg, opts.mode);
    const double target_v = vartheta * cfg.operating_voltage;
    ActPlan plan{ActKind::VoltageEqualization, dist, vartheta, {}};

    for (int n = 0; n < kNumRings; ++n) {
        const SfEntry& sf = sf_table()[static_cast<std::size_t>(n)];
        if (!(target_v > m.v_inf_on && target_v < m.v_inf_off)) {
            throw InfeasibleError(sf.sf, fmt::format("target mean voltage {:.6g} V outside ({:.6g}, {:.6g}) V",
                                                     target_v, m.v_inf_on, m.v_inf_off));
        }
        const CycleConstants cc = cycle_constants(m, sf.airtime);
        const double target = cve_target_decay(target_v, cc);
        if (!(target > 0.0 && target < 1.0)) {
            throw InfeasibleError(sf.sf, fmt::format("required E[X] = {:.6g} is outside (0, 1)", target));
        }

        auto residual = [&](double p) {
            return expected_decay_factor(DecayFactorDistribution{make_scheme(dist, p, opts), m.tau_off}) - target;
        };
        const double base = dist == ChargingKind::Uniform ? opts.uniform_a : 0.0;
        double lo = base + 1e-9 * std::max(1.0, base);
        if (residual(lo) < 0.0) {
            throw InfeasibleError(sf.sf, fmt::format("required E[X] = {:.12g} needs a vanishing charging time", target));
        }
        double hi = std::max(1.0, 10.0 * m.tau_off) + base;
        while (residual(hi) > 0.0) {
            hi *= 2.0;
            if (hi > 1e15) throw NumericalError(fmt::format("SF{}: could not bracket the CVE solution", sf.sf));
        }
        boost::uintmax_t iterations = 200;
        const auto bracket = boost::math::tools::bisect(residual, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                                        iterations);
        const double solved = 0.5 * (bracket.first + bracket.second);
        if (std::abs(residual(solved)) >= 1e-10) {
            throw NumericalError(fmt::format("SF{}: CVE bisection stalled at |E[X] - target| = {:.3g}", sf.sf,
                                             std::abs(residual(solved))));
        }
        if (solved < kActFloorSeconds) {
            throw InfeasibleError(sf.sf, fmt::format("solved {} = {:.6g} s is below the {} s floor",
                                                     dist == ChargingKind::Uniform ? "b" : "w", solved,
                                                     kActFloorSeconds));
        }
        plan.entries[static_cast<std::size_t>(n)] = evaluate(sf, make_scheme(dist, solved, opts), m, cfg, opts);
    }
    return plan;
}

}  // namespace ehlora
