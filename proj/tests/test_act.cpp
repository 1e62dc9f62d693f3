#include <catch_amalgamated.hpp>

#include "ehlora/act.hpp"
#include "ehlora/error.hpp"

using namespace ehlora;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ActOptions small_chain() {
    ActOptions o;
    o.markov.bins = 400;
    return o;
}

}  // namespace

TEST_CASE("CDC sets the mean charging time to theta airtimes") {
    const PhyConfig cfg;
    const auto plan = plan_cdc(150.0, ChargingKind::Uniform, cfg);
    CHECK(plan.kind == ActKind::ConstantDutyCycle);
    CHECK(plan.target == 150.0);
    const auto& sf10 = plan.entries[3];
    CHECK(sf10.sf == 10);
    CHECK_THAT(sf10.scheme.second(), WithinRel(61.2, 1e-12));
    CHECK(sf10.scheme.first() == 0.0);
    CHECK_THAT(sf10.mean_nu, WithinRel(30.6, 1e-12));
    for (const auto& e : plan.entries) {
        CHECK_THAT(e.duty_cycle, WithinAbs(plan.entries[0].duty_cycle, 1e-12));
        CHECK_THAT(e.duty_cycle, WithinRel(1.0 / 151.0, 1e-12));
        CHECK(e.etsi_ok);
        CHECK(e.stationary.has_value());
    }
    for (std::size_t n = 1; n < plan.entries.size(); ++n) {
        CHECK(plan.entries[n].markov_mean < plan.entries[n - 1].markov_mean);
        CHECK(plan.entries[n].predicted_mean < plan.entries[n - 1].predicted_mean);
    }
}

TEST_CASE("CDC Weibull scale and the duty-cycle limit") {
    const PhyConfig cfg;
    ActOptions opts = small_chain();
    opts.weibull_k = 2.0;
    const auto plan = plan_cdc(99.0, ChargingKind::Weibull, cfg, opts);
    for (const auto& e : plan.entries) {
        CHECK_THAT(e.scheme.mean(), WithinRel(99.0 * e.airtime, 1e-12));
        CHECK_THAT(e.scheme.second(), WithinRel(99.0 * e.airtime / std::tgamma(1.5), 1e-12));
        CHECK_THAT(e.duty_cycle, WithinRel(0.01, 1e-12));
        CHECK(e.etsi_ok);
    }
    CHECK_FALSE(plan_cdc(98.0, ChargingKind::Weibull, cfg, opts).entries[0].etsi_ok);
    opts.uniform_a = 10.0;
    try {
        plan_cdc(40.0, ChargingKind::Uniform, cfg, opts);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.sf() == 7);
    }
    CHECK_THROWS_AS(plan_cdc(0.0, ChargingKind::Uniform, cfg), OutOfRangeError);
}

TEST_CASE("CVE with an exponential charging time has a closed form") {
    const PhyConfig cfg;
    const auto m = build_model(cfg);
    const auto plan = plan_cve(1.0, ChargingKind::Weibull, cfg, small_chain());
    for (const auto& e : plan.entries) {
        const auto cc = cycle_constants(m, e.airtime);
        const double ex = cve_target_decay(cfg.operating_voltage, cc);
        const double w = m.tau_off * (1.0 - ex) / ex;
        CHECK(e.scheme.first() == 1.0);
        CHECK_THAT(e.scheme.second(), WithinRel(w, 1e-10));
        CHECK_THAT(e.expected_decay, WithinAbs(ex, 1e-10));
        CHECK_THAT(e.predicted_mean, WithinAbs(cfg.operating_voltage, 1e-8));
    }
}

TEST_CASE("CVE equalises the mean voltage on a larger capacitor") {
    PhyConfig cfg;
    cfg.capacitance = 40e-3;
    for (auto dist : {ChargingKind::Uniform, ChargingKind::Weibull}) {
        const auto plan = plan_cve(1.0, dist, cfg);
        for (const auto& a : plan.entries) {
            CHECK_THAT(a.markov_mean, WithinRel(cfg.operating_voltage, 0.01));
            for (const auto& b : plan.entries) CHECK(std::abs(a.markov_mean - b.markov_mean) <= 0.01 * b.markov_mean);
        }
        for (std::size_t n = 1; n < plan.entries.size(); ++n) {
            CHECK(plan.entries[n].mean_nu > plan.entries[n - 1].mean_nu);
        }
    }
}

TEST_CASE("CVE reports the first infeasible SF") {
    const PhyConfig cfg;
    try {
        plan_cve(1.8, ChargingKind::Uniform, cfg, small_chain());
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.sf() == 7);
        CHECK_THAT(std::string(e.what()), ContainsSubstring("SF7"));
        CHECK_THAT(std::string(e.what()), ContainsSubstring("outside (0, 1)"));
    }
    // A target whose solution is a sub-second exponential scale.
    const auto m = build_model(cfg);
    const double near_floor = estimate_mean_voltage(0.998, cycle_constants(m, sf_entry(7).airtime));
    try {
        plan_cve(near_floor / cfg.operating_voltage, ChargingKind::Weibull, cfg, small_chain());
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.sf() == 7);
        CHECK_THAT(std::string(e.what()), ContainsSubstring("floor"));
    }
    CHECK_THROWS_AS(plan_cve(-1.0, ChargingKind::Uniform, cfg), OutOfRangeError);
}

TEST_CASE("plans reproduce through the Markov chain") {
    const PhyConfig cfg;
    const auto m = build_model(cfg);
    ActOptions opts = small_chain();
    const auto plan = plan_cdc(150.0, ChargingKind::Weibull, cfg, opts);
    for (const auto& e : plan.entries) {
        const auto a = analyze_energy_outage(m, e.scheme, e.airtime, cfg.operating_voltage, opts.markov);
        CHECK(a.outage == e.predicted_outage);
        CHECK(a.stationary.mean() == e.markov_mean);
        CHECK_THAT(e.markov_mean, WithinRel(e.predicted_mean, 0.03));
    }
    opts.keep_stationary = false;
    CHECK_FALSE(plan_cdc(150.0, ChargingKind::Weibull, cfg, opts).entries[0].stationary.has_value());
}

TEST_CASE("wider charging spread widens the voltage spread") {
    const PhyConfig cfg;
    const auto ud = plan_cdc(150.0, ChargingKind::Uniform, cfg);
    const auto wd = plan_cdc(150.0, ChargingKind::Weibull, cfg);
    for (std::size_t n = 0; n < ud.entries.size(); ++n) CHECK(wd.entries[n].markov_stddev > ud.entries[n].markov_stddev);
}

TEST_CASE("kind names") {
    CHECK(to_string(ActKind::ConstantDutyCycle) == "cdc");
    CHECK(act_kind_from_string("cve") == ActKind::VoltageEqualization);
    CHECK_THROWS_AS(act_kind_from_string("x"), ConfigError);
}
