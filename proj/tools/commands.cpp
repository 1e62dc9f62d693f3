#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "ehlora/csv.hpp"
#include "ehlora/error.hpp"
#include "ehlora/geometry.hpp"
#include "json.hpp"

namespace ehlora::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string scheme_tag(ChargingKind k) { return k == ChargingKind::Uniform ? "ud" : "wd"; }

std::vector<ChargingKind> selected_schemes(const CommonOptions& common) {
    if (common.scheme) return {*common.scheme};
    return {ChargingKind::Uniform, ChargingKind::Weibull};
}

fs::path write_file(const CommonOptions& common, const std::string& name,
                    const std::function<void(std::ostream&)>& body) {
    std::error_code ec;
    fs::create_directories(common.out, ec);
    const fs::path path = common.out / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("out", "cannot write '" + path.string() + "'");
    body(os);
    os.flush();
    if (!os) throw ConfigError("out", "write to '" + path.string() + "' failed");
    return path;
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(epoch));
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(t));
}

ordered_json scheme_json(const ChargingScheme& s) {
    ordered_json j;
    j["kind"] = scheme_tag(s.kind());
    if (s.kind() == ChargingKind::Uniform) {
        j["a"] = s.first();
        j["b"] = s.second();
    } else {
        j["k"] = s.first();
        j["w"] = s.second();
    }
    return j;
}

ordered_json config_json(const Config& c) {
    const PhyConfig& p = c.phy;
    ordered_json j;
    j["harvester"] = {{"voltage", p.harvester_voltage}, {"power_w", p.harvest_power}};
    j["capacitor"] = {{"capacitance", p.capacitance},
                      {"load_off", p.load_off},
                      {"load_on", p.load_on},
                      {"operating_voltage", p.operating_voltage},
                      {"initial_voltage", p.initial_voltage},
                      {"mode", std::string(to_string(c.mode))}};
    j["radio"] = {{"tx_power_w", p.tx_power},
                  {"tx_overhead_w", p.tx_overhead},
                  {"bandwidth", p.bandwidth},
                  {"path_loss_exponent", p.path_loss_exponent},
                  {"wavelength_m", p.wavelength},
                  {"noise_w", p.noise},
                  {"sir_threshold", p.sir_threshold}};
    j["deployment"] = {{"radius", p.disk_radius}, {"intensity", p.intensity}, {"rings", p.ring_radii}};
    j["scheme"] = {{"ud", scheme_json(c.uniform)}, {"wd", scheme_json(c.weibull)},
                   {"default", scheme_tag(c.default_kind)}};
    j["markov"] = {{"bins", c.bins}};
    return j;
}

void write_manifest(const CommonOptions& common, const Config& cfg, const std::string& command,
                    const ordered_json& options, CommandResult& result) {
    ordered_json m;
    m["tool"] = "ehlora";
    m["version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = common.seed;
    m["threads"] = common.threads;
    m["config_source"] = common.config ? common.config->string() : std::string();
    m["config"] = config_json(cfg);
    m["options"] = options;
    ordered_json outs = ordered_json::array();
    for (const auto& p : result.outputs) outs.push_back(p.filename().string());
    m["outputs"] = outs;
    m["timestamp"] = timestamp();
    result.manifest = write_file(common, "manifest_" + command + ".json", [&](std::ostream& os) {
        os << m.dump(2) << '\n';
    });
}

MarkovOptions markov_options(const Config& cfg, std::optional<int> bins, int threads) {
    MarkovOptions o;
    o.bins = bins.value_or(cfg.bins);
    if (o.bins < 1) throw ConfigError("bins", "must be at least 1");
    o.transition.threads = threads;
    return o;
}

}  // namespace

Config resolve_config(const CommonOptions& common) {
    Config cfg;
    if (common.config) {
        cfg = load_config(*common.config);
    } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
        cfg = load_config(env);
    }
    if (common.mode) cfg.mode = *common.mode;
    if (common.scheme) cfg.default_kind = *common.scheme;
    if (common.threads < 1) throw ConfigError("threads", "must be at least 1");
    return cfg;
}

CommandResult cmd_capacitor_trace(const CommonOptions& common, const TraceArgs& args) {
    const Config cfg = resolve_config(common);
    const CapacitorModel m = build_model(cfg.phy, cfg.mode);
    const double airtime = sf_entry(args.sf).airtime;
    TrajectoryOptions topts;
    topts.samples_per_phase = args.samples_per_phase;

    CommandResult result;
    for (ChargingKind kind : selected_schemes(common)) {
        const auto traj =
            simulate_trajectory(cfg.phy.initial_voltage, cfg.scheme(kind), airtime, args.cycles, common.seed, m, topts);
        result.outputs.push_back(write_file(common, "trace_" + scheme_tag(kind) + ".csv",
                                            [&](std::ostream& os) { csv::write_trajectory(os, traj); }));
        const auto ends = traj.end_of_cycle();
        std::size_t below = 0;
        for (double v : ends) below += v <= cfg.phy.operating_voltage ? 1 : 0;
        result.summary += fmt::format("{}: {} cycles, {} end-of-cycle samples at or below {} V\n", scheme_tag(kind),
                                      args.cycles, below, cfg.phy.operating_voltage);
    }
    ordered_json opts{{"cycles", args.cycles}, {"sf", args.sf}, {"samples_per_phase", args.samples_per_phase}};
    write_manifest(common, cfg, "capacitor-trace", opts, result);
    return result;
}

CommandResult cmd_steady_state(const CommonOptions& common, const SteadyStateArgs& args) {
    const Config cfg = resolve_config(common);
    const CapacitorModel m = build_model(cfg.phy, cfg.mode);
    MarkovOptions mo = markov_options(cfg, args.bins, common.threads);
    mo.transition.construction = args.construction;
    const double airtime = sf_entry(args.sf).airtime;

    CommandResult result;
    if (mo.bins < 100) {
        result.warnings.push_back(fmt::format("M = {} bins is a coarse grid; outage values are unreliable", mo.bins));
    }
    std::vector<std::string> summary_rows;
    for (ChargingKind kind : selected_schemes(common)) {
        const auto& scheme = cfg.scheme(kind);
        const auto a = analyze_energy_outage(m, scheme, airtime, cfg.phy.operating_voltage, mo);
        result.outputs.push_back(write_file(common, "steady_" + scheme_tag(kind) + ".csv",
                                            [&](std::ostream& os) { csv::write_stationary(os, a.stationary); }));
        const auto conv =
            convergence_report(m, scheme, airtime, cfg.phy.operating_voltage, {mo.bins, 2 * mo.bins}, mo);
        result.outputs.push_back(write_file(common, "convergence_" + scheme_tag(kind) + ".csv",
                                            [&](std::ostream& os) { csv::write_convergence(os, conv); }));
        summary_rows.push_back(fmt::format("{},{},{},{},{},{},{}", scheme_tag(kind), mo.bins, csv::num(a.outage),
                                           csv::num(a.stationary.mean()), csv::num(a.stationary.stddev()),
                                           csv::num(a.estimator_mean), a.stationary.iterations));
        result.summary += fmt::format("{}: energy outage {:.2f}% (M = {}, 2M gives {:.2f}%), mean {:.4f} V\n",
                                      scheme_tag(kind), 100.0 * a.outage, mo.bins, 100.0 * conv.back().outage,
                                      a.stationary.mean());
    }
    result.outputs.push_back(write_file(common, "steady_summary.csv", [&](std::ostream& os) {
        os << "scheme,M,outage,mean_V,stddev_V,estimator_mean_V,iterations\n";
        for (const auto& r : summary_rows) os << r << '\n';
    }));
    ordered_json opts{{"bins", mo.bins},
                      {"sf", args.sf},
                      {"construction", args.construction == TransitionConstruction::CdfMass ? "cdf-mass" : "density"}};
    write_manifest(common, cfg, "steady-state", opts, result);
    return result;
}

CommandResult cmd_outage_sweep(const CommonOptions& common, const SweepArgs& args) {
    const Config cfg = resolve_config(common);
    const CapacitorModel m = build_model(cfg.phy, cfg.mode);
    const MarkovOptions mo = markov_options(cfg, args.bins, common.threads);

    CommandResult result;
    std::vector<csv::SweepRow> rows;
    for (ChargingKind kind : selected_schemes(common)) {
        const auto& scheme = cfg.scheme(kind);
        std::string line = scheme_tag(kind) + ":";
        for (const auto& sf : sf_table()) {
            const auto a = analyze_energy_outage(m, scheme, sf.airtime, cfg.phy.operating_voltage, mo);
            rows.push_back({sf.sf, sf.airtime, kind, scheme.mean(), a.expected_decay, a.estimator_mean,
                            a.stationary.mean(), a.outage});
            line += fmt::format(" SF{} {:.2f}%", sf.sf, 100.0 * a.outage);
        }
        result.summary += line + "\n";
    }
    result.outputs.push_back(
        write_file(common, "outage_sweep.csv", [&](std::ostream& os) { csv::write_outage_sweep(os, rows); }));
    write_manifest(common, cfg, "outage-sweep", ordered_json{{"bins", mo.bins}}, result);
    return result;
}

CommandResult cmd_coverage(const CommonOptions& common, const CoverageArgs& args) {
    const Config cfg = resolve_config(common);
    const CapacitorModel m = build_model(cfg.phy, cfg.mode);
    const MarkovOptions mo = markov_options(cfg, args.bins, common.threads);
    const ChargingScheme& scheme = cfg.scheme(cfg.default_kind);

    std::array<double, kNumRings> outage{};
    for (int n = 0; n < kNumRings; ++n) {
        outage[static_cast<std::size_t>(n)] =
            analyze_energy_outage(m, scheme, sf_table()[static_cast<std::size_t>(n)].airtime,
                                  cfg.phy.operating_voltage, mo)
                .outage;
    }
    CoverageOptions co;
    co.points = args.points;
    co.duty = args.duty;
    co.upper = args.upper;
    co.connection.samples = args.upper_samples;
    co.connection.seed = common.seed;
    const CoverageProfile profile = coverage_profile(cfg.phy, scheme, outage, co);

    std::vector<csv::CoverageCheck> checks;
    CommandResult result;
    if (args.mc_duration > 0) {
        const NetworkRealization net = sample_network(cfg.phy, common.seed);
        SimOptions so;
        so.threads = common.threads;
        so.mode = cfg.mode;
        const SimReport rep = run_simulation(net, cfg.phy, scheme, args.mc_duration, common.seed, so);
        for (const auto& r : rep.rings) checks.push_back({r.overall.value, r.overall.half_width});
        result.summary += fmt::format("Monte Carlo cross-check: {} devices, {} s\n", net.devices.size(),
                                      args.mc_duration);
    }
    result.outputs.push_back(write_file(
        common, "coverage.csv", [&](std::ostream& os) { csv::write_coverage(os, profile, args.upper, checks); }));
    for (int n = 0; n < kNumRings; ++n) {
        result.summary += fmt::format("SF{}: energy outage {:.2f}%\n", sf_table()[static_cast<std::size_t>(n)].sf,
                                      100.0 * outage[static_cast<std::size_t>(n)]);
    }
    ordered_json opts{{"scheme", scheme_tag(cfg.default_kind)},
                      {"points", args.points},
                      {"upper", args.upper},
                      {"upper_samples", args.upper_samples},
                      {"duty", args.duty == DutyModel::PerCycleMean ? "per-cycle" : "time-average"},
                      {"mc_duration", args.mc_duration},
                      {"bins", mo.bins}};
    write_manifest(common, cfg, "coverage", opts, result);
    return result;
}

CommandResult cmd_act_plan(const CommonOptions& common, const ActArgs& args) {
    const Config cfg = resolve_config(common);
    ActOptions ao;
    ao.mode = cfg.mode;
    ao.markov = markov_options(cfg, args.bins, common.threads);
    ao.uniform_a = 0.0;
    ao.weibull_k = 1.0;
    const ChargingKind dist = cfg.default_kind;
    const ActPlan plan = args.kind == ActKind::ConstantDutyCycle ? plan_cdc(args.theta, dist, cfg.phy, ao)
                                                                   : plan_cve(args.vartheta, dist, cfg.phy, ao);
    CommandResult result;
    const std::string stem = fmt::format("act_{}_{}", to_string(args.kind), scheme_tag(dist));
    result.outputs.push_back(
        write_file(common, stem + ".csv", [&](std::ostream& os) { csv::write_act_plan(os, plan); }));
    result.outputs.push_back(
        write_file(common, stem + "_pdf.csv", [&](std::ostream& os) { csv::write_act_pdfs(os, plan); }));
    for (const auto& e : plan.entries) {
        result.summary += fmt::format("SF{}: E[nu] = {:.4g} s, duty {:.4f}%, mean {:.4f} V, outage {:.2f}%\n", e.sf,
                                      e.mean_nu, 100.0 * e.duty_cycle, e.markov_mean, 100.0 * e.predicted_outage);
        if (!e.etsi_ok) {
            result.warnings.push_back(fmt::format("SF{} duty cycle {:.4f}% exceeds the 1% cap", e.sf,
                                                  100.0 * e.duty_cycle));
        }
    }
    ordered_json opts{{"kind", std::string(to_string(args.kind))},
                      {"dist", scheme_tag(dist)},
                      {"theta", args.theta},
                      {"vartheta", args.vartheta},
                      {"bins", ao.markov.bins}};
    write_manifest(common, cfg, "act-plan", opts, result);
    return result;
}

CommandResult cmd_simulate(const CommonOptions& common, const SimulateArgs& args) {
    const Config cfg = resolve_config(common);
    NetworkRealization net = sample_network(cfg.phy, common.seed);
    if (args.probes_per_ring > 0) add_ring_probes(net, cfg.phy, args.probes_per_ring);
    SimOptions so;
    so.overlap = args.overlap;
    so.energy_rule = args.energy_rule;
    so.threads = common.threads;
    so.mode = cfg.mode;
    const ChargingScheme& scheme = cfg.scheme(cfg.default_kind);
    const SimReport rep = run_simulation(net, cfg.phy, scheme, args.duration, common.seed, so);

    CommandResult result;
    result.outputs.push_back(
        write_file(common, "sim_rings.csv", [&](std::ostream& os) { csv::write_sim_rings(os, rep); }));
    result.outputs.push_back(
        write_file(common, "sim_collision.csv", [&](std::ostream& os) { csv::write_collision(os, rep); }));
    if (args.device_dump) {
        result.outputs.push_back(
            write_file(common, "sim_devices.csv", [&](std::ostream& os) { csv::write_sim_devices(os, rep); }));
    }
    result.summary += fmt::format("{} devices, {} s simulated after {} s warm-up\n", net.devices.size(),
                                  args.duration, rep.warmup);
    for (const auto& r : rep.rings) {
        result.summary += fmt::format("ring {} (SF{}): {} devices, E {:.4f}, C {:.4f}, Q {:.4f} +- {:.4f}\n", r.ring,
                                      r.sf, r.devices, r.energy.value, r.connection.value, r.overall.value,
                                      r.overall.half_width);
    }
    ordered_json opts{{"scheme", scheme_tag(cfg.default_kind)},
                      {"duration", args.duration},
                      {"overlap", std::string(to_string(args.overlap))},
                      {"energy_rule", std::string(to_string(args.energy_rule))},
                      {"probes_per_ring", args.probes_per_ring},
                      {"device_dump", args.device_dump}};
    write_manifest(common, cfg, "simulate", opts, result);
    return result;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Config:
        case ErrorKind::OutOfRange: return 1;
        case ErrorKind::Numerical:
        case ErrorKind::Model:
        case ErrorKind::Statistics: return 2;
        case ErrorKind::Infeasible: return 3;
    }
    return 2;
}

}  // namespace ehlora::cli
