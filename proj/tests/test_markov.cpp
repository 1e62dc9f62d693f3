#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ehlora/capacitor.hpp"
#include "ehlora/error.hpp"
#include "ehlora/markov.hpp"

using namespace ehlora;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

// Post-discharge voltages of a long single-device run.
std::vector<double> simulate_chain(const CapacitorModel& m, const ChargingScheme& s, double tau, std::size_t n,
                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    double v = 1.8;
    for (int i = 0; i < 2000; ++i) v = step_discharge(step_charge(v, s.sample(rng), m), tau, m);
    for (std::size_t i = 0; i < n; ++i) {
        v = step_discharge(step_charge(v, s.sample(rng), m), tau, m);
        out.push_back(v);
    }
    return out;
}

}  // namespace

TEST_CASE("expected decay factor closed forms") {
    CHECK_THAT(expected_decay_factor({ChargingScheme::weibull(1.0, 50.0), 6000.0}), WithinRel(6000.0 / 6050.0, 1e-14));
    CHECK_THAT(expected_decay_factor({ChargingScheme::uniform(0.0, 100.0), 6000.0}),
               WithinRel(60.0 * (1.0 - std::exp(-1.0 / 60.0)), 1e-14));
    CHECK_THAT(expected_decay_factor({ChargingScheme::weibull(1.0, 50.0), 6000.0}), WithinAbs(0.991736, 1e-6));
    CHECK_THAT(expected_decay_factor({ChargingScheme::uniform(0.0, 100.0), 6000.0}), WithinAbs(0.991713, 1e-6));
    CHECK_THAT(expected_decay_factor({ChargingScheme::uniform(0.0, 1e-9), 100.0}), WithinAbs(1.0, 1e-11));
    // Quadrature path against an integral over nu.
    const auto w = ChargingScheme::weibull(2.2, 80.0);
    const double oracle = gk([&](double x) { return std::exp(-x / 106.96) * w.pdf(x); }, 0.0,
                             std::numeric_limits<double>::infinity());
    CHECK_THAT(expected_decay_factor({w, 106.96}), WithinRel(oracle, 1e-9));
}

TEST_CASE("decay factor density") {
    const double tau = 106.96;
    const DecayFactorDistribution u{ChargingScheme::uniform(10.0, 100.0), tau};
    CHECK(u.support_lo() == std::exp(-100.0 / tau));
    CHECK(u.support_hi() == std::exp(-10.0 / tau));
    CHECK_THAT(gk([&](double x) { return u.pdf(x); }, u.support_lo(), u.support_hi()), WithinAbs(1.0, 1e-8));
    for (const auto& s : {ChargingScheme::weibull(1.0, 50.0), ChargingScheme::weibull(2.0, 50.0)}) {
        const DecayFactorDistribution d{s, tau};
        CHECK(d.support_lo() == 0.0);
        CHECK(d.support_hi() == 1.0);
        CHECK_THAT(gk([&](double x) { return d.pdf(x); }, 0.0, 1.0), WithinAbs(1.0, 1e-8));
        CHECK_THAT(d.cdf(0.6), WithinAbs(gk([&](double x) { return d.pdf(x); }, 0.0, 0.6), 1e-8));
    }
}

TEST_CASE("transition matrix structure") {
    const auto m = build_model(PhyConfig{});
    const auto cc = cycle_constants(m, 0.204);
    const DecayFactorDistribution d{ChargingScheme::uniform(20.0, 100.0), m.tau_off};

    const auto one = build_transition_matrix(d, cc, VoltageGrid::for_model(m, 1));
    REQUIRE(one.size() == 1);
    CHECK(one.at(0, 0) == 1.0);

    const auto grid = VoltageGrid::for_model(m, 300);
    CHECK(grid.lo == m.v_inf_on);
    CHECK(grid.hi == m.v_inf_off);
    CHECK(grid.delta() == (m.v_inf_off - m.v_inf_on) / 300);
    for (auto construction : {TransitionConstruction::DensityAtCenter, TransitionConstruction::CdfMass}) {
        TransitionOptions opts;
        opts.construction = construction;
        const auto s = build_transition_matrix(d, cc, grid, opts);
        for (int i = 0; i < s.size(); ++i) {
            CHECK_THAT(s.row_sum(i), WithinAbs(1.0, 1e-12));
            if (construction != TransitionConstruction::DensityAtCenter || s.is_self_loop_row(i)) continue;
            s.for_each_in_row(i, [&](int j, double p) {
                REQUIRE(p >= 0.0);
                const double x = (grid.center(j) - cc.c1) / (cc.c2 * (grid.center(i) - cc.c3));
                CHECK(x >= d.support_lo() * (1 - 1e-12));
                CHECK(x <= d.support_hi() * (1 + 1e-12));
            });
        }
    }
}

TEST_CASE("threaded construction is identical") {
    const auto m = build_model(PhyConfig{});
    const auto cc = cycle_constants(m, 0.204);
    const DecayFactorDistribution d{ChargingScheme::weibull(1.0, 50.0), m.tau_off};
    const auto grid = VoltageGrid::for_model(m, 500);
    TransitionOptions one, four;
    four.threads = 4;
    const auto a = build_transition_matrix(d, cc, grid, one);
    const auto b = build_transition_matrix(d, cc, grid, four);
    REQUIRE(a.nonzeros() == b.nonzeros());
    for (int i = 0; i < a.size(); i += 7) {
        for (int j = 0; j < a.size(); j += 3) REQUIRE(a.at(i, j) == b.at(i, j));
    }
}

TEST_CASE("degenerate chains") {
    const VoltageGrid g3{0.0, 3.0, 3};
    const auto identity = TransitionMatrix::from_dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, g3);
    const auto sd = stationary_distribution(identity);
    for (double p : sd.probabilities) CHECK_THAT(p, WithinAbs(1.0 / 3.0, 1e-15));

    const VoltageGrid g2{0.0, 2.0, 2};
    const auto sym = stationary_distribution(TransitionMatrix::from_dense({{0.5, 0.5}, {0.5, 0.5}}, g2));
    CHECK_THAT(sym.probabilities[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(sym.probabilities[1], WithinAbs(0.5, 1e-15));

    // A zero row receives a self loop.
    const auto s = TransitionMatrix::from_dense({{0, 1}, {0, 0}}, g2);
    CHECK(s.is_self_loop_row(1));
    CHECK(s.at(1, 1) == 1.0);
}

TEST_CASE("stationary distribution of the reference chain") {
    const auto m = build_model(PhyConfig{});
    for (const auto& scheme : {ChargingScheme::uniform(0.0, 100.0), ChargingScheme::weibull(1.0, 50.0)}) {
        const auto a = analyze_energy_outage(m, scheme, 0.204, 1.8);
        const auto& sd = a.stationary;
        double sum = 0.0;
        for (double p : sd.probabilities) {
            REQUIRE(p >= 0.0);
            sum += p;
        }
        CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
        CHECK(sd.residual < 1e-10);
        const auto cdf = sd.cdf();
        for (std::size_t k = 1; k < cdf.size(); ++k) CHECK(cdf[k] >= cdf[k - 1]);
        CHECK_THAT(cdf.back(), WithinAbs(1.0, 1e-12));
        double mass = 0.0;
        for (const auto& [v, f] : stationary_pdf(sd)) mass += f * sd.delta();
        CHECK_THAT(mass, WithinAbs(1.0, 1e-12));
        CHECK(energy_outage(sd, m.v_inf_on) == 0.0);
        CHECK_THAT(energy_outage(sd, m.v_inf_off), WithinAbs(1.0, 1e-12));
        // The estimator is exact for the continuous chain's mean.
        CHECK_THAT(sd.mean(), WithinRel(a.estimator_mean, 0.03));
    }
}

TEST_CASE("start vector does not matter") {
    const auto m = build_model(PhyConfig{});
    const auto cc = cycle_constants(m, 0.204);
    const DecayFactorDistribution d{ChargingScheme::uniform(0.0, 100.0), m.tau_off};
    const auto s = build_transition_matrix(d, cc, VoltageGrid::for_model(m, 1000));
    const auto base = stationary_distribution(s);
    StationaryOptions peaked;
    peaked.start.assign(1000, 0.0);
    peaked.start[700] = 1.0;
    const auto other = stationary_distribution(s, peaked);
    CHECK(total_variation(base.probabilities, other.probabilities) < 1e-9);
}

TEST_CASE("dense and power iteration agree") {
    const auto m = build_model(PhyConfig{});
    const auto cc = cycle_constants(m, 0.204);
    const DecayFactorDistribution d{ChargingScheme::weibull(1.0, 50.0), m.tau_off};
    const auto s = build_transition_matrix(d, cc, VoltageGrid::for_model(m, 400));
    StationaryOptions dense;
    dense.method = StationaryMethod::Dense;
    const auto a = stationary_distribution(s);
    const auto b = stationary_distribution(s, dense);
    CHECK(total_variation(a.probabilities, b.probabilities) < 1e-9);
}

TEST_CASE("grid convergence and construction variants") {
    const auto m = build_model(PhyConfig{});
    for (const auto& scheme : {ChargingScheme::uniform(0.0, 100.0), ChargingScheme::weibull(1.0, 50.0)}) {
        const auto report = convergence_report(m, scheme, 0.204, 1.8, {1000, 2000});
        CHECK(std::abs(report[0].outage - report[1].outage) < 0.005);
        MarkovOptions mass;
        mass.transition.construction = TransitionConstruction::CdfMass;
        const double a = analyze_energy_outage(m, scheme, 0.204, 1.8).outage;
        const double b = analyze_energy_outage(m, scheme, 0.204, 1.8, mass).outage;
        CHECK(std::abs(a - b) < 0.005);
    }
}

TEST_CASE("Markov outage matches a long simulated chain") {
    Rng pick(2024);
    for (int trial = 0; trial < 5; ++trial) {
        PhyConfig cfg;
        cfg.capacitance = 5e-3 + 15e-3 * pick.uniform();
        const bool uniform = trial % 2 == 0;
        const ChargingScheme s = uniform ? ChargingScheme::uniform(0.0, 60.0 + 90.0 * pick.uniform())
                                         : ChargingScheme::weibull(0.7 + 1.3 * pick.uniform(), 30.0 + 50.0 * pick.uniform());
        const double tau = sf_table()[2 + trial % 3].airtime;
        const auto m = build_model(cfg);
        const double markov = analyze_energy_outage(m, s, tau, cfg.operating_voltage).outage;
        const auto chain = simulate_chain(m, s, tau, 1000000, 100 + trial);
        double below = 0.0;
        for (double v : chain) below += v <= cfg.operating_voltage ? 1.0 : 0.0;
        INFO("trial " << trial << " C = " << cfg.capacitance << " tau = " << tau);
        CHECK(std::abs(markov - below / chain.size()) < 0.01);
    }
}

TEST_CASE("stationary mode agrees with the simulated histogram") {
    const auto m = build_model(PhyConfig{});
    for (const auto& s : {ChargingScheme::uniform(0.0, 100.0), ChargingScheme::weibull(1.0, 50.0)}) {
        MarkovOptions opts;
        opts.bins = 200;
        const auto sd = analyze_energy_outage(m, s, 0.204, 1.8, opts).stationary;
        std::vector<double> hist(200, 0.0);
        for (double v : simulate_chain(m, s, 0.204, 2000000, 5)) {
            const int k = std::clamp(static_cast<int>((v - sd.grid.lo) / sd.delta()), 0, 199);
            hist[static_cast<std::size_t>(k)] += 1.0;
        }
        const int mc_mode = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
        CHECK(std::abs(mc_mode - sd.mode_bin()) <= 2);
    }
}

TEST_CASE("model error when no transition is feasible") {
    const auto m = build_model(PhyConfig{});
    const auto cc = cycle_constants(m, 0.204);
    // Every implied decay factor falls outside a tiny support.
    const DecayFactorDistribution d{ChargingScheme::uniform(5000.0, 5000.001), m.tau_off};
    CHECK_THROWS_AS(build_transition_matrix(d, cc, VoltageGrid::for_model(m, 20)), ModelError);
}
