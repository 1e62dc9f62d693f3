#include <iostream>
#include <map>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ehlora/error.hpp"

namespace {

using namespace ehlora;

template <class T>
CLI::CheckedTransformer choice(const std::map<std::string, T>& m) {
    return CLI::CheckedTransformer(m, CLI::ignore_case);
}

void add_common(CLI::App& cmd, cli::CommonOptions& common) {
    cmd.add_option("--config", common.config, "INI config file (default: $EHLORA_CONFIG, else built-in values)")
        ->check(CLI::ExistingFile);
    cmd.add_option("--seed", common.seed, "seed for every random draw");
    cmd.add_option("--out", common.out, "output directory");
    cmd.add_option("--mode", common.mode, "capacitor model: literal or thevenin")
        ->transform(choice<CapacitorMode>({{"literal", CapacitorMode::Literal}, {"thevenin", CapacitorMode::Thevenin}}));
    cmd.add_option("--scheme", common.scheme, "charging distribution: ud or wd")
        ->transform(choice<ChargingKind>({{"ud", ChargingKind::Uniform}, {"wd", ChargingKind::Weibull}}));
    cmd.add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-harvesting LoRa device and network analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cli::kToolVersion);

    cli::CommonOptions common;

    cli::TraceArgs trace;
    auto* c_trace = app.add_subcommand("capacitor-trace", "capacitor voltage trajectories for UD and WD");
    add_common(*c_trace, common);
    c_trace->add_option("--cycles", trace.cycles, "charge/transmit cycles");
    c_trace->add_option("--sf", trace.sf, "spreading factor whose airtime is used")->check(CLI::Range(7, 12));
    c_trace->add_option("--samples-per-phase", trace.samples_per_phase)->check(CLI::PositiveNumber);

    cli::SteadyStateArgs steady;
    auto* c_steady = app.add_subcommand("steady-state", "stationary voltage pdf/cdf and energy outage");
    add_common(*c_steady, common);
    c_steady->add_option("--bins,-M", steady.bins, "voltage bins")->check(CLI::PositiveNumber);
    c_steady->add_option("--sf", steady.sf)->check(CLI::Range(7, 12));
    c_steady->add_option("--construction", steady.construction, "density or cdf-mass")
        ->transform(choice<TransitionConstruction>(
            {{"density", TransitionConstruction::DensityAtCenter}, {"cdf-mass", TransitionConstruction::CdfMass}}));

    cli::SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("outage-sweep", "energy outage for every SF");
    add_common(*c_sweep, common);
    c_sweep->add_option("--bins,-M", sweep.bins)->check(CLI::PositiveNumber);

    cli::CoverageArgs cov;
    auto* c_cov = app.add_subcommand("coverage", "success probabilities against distance");
    add_common(*c_cov, common);
    c_cov->add_option("--points", cov.points)->check(CLI::PositiveNumber);
    c_cov->add_flag("--upper", cov.upper, "add the Monte Carlo joint SNR/SIR column");
    c_cov->add_option("--upper-samples", cov.upper_samples)->check(CLI::PositiveNumber);
    c_cov->add_option("--duty", cov.duty, "per-cycle or time-average")
        ->transform(choice<DutyModel>({{"per-cycle", DutyModel::PerCycleMean}, {"time-average", DutyModel::TimeAverage}}));
    c_cov->add_option("--mc-duration", cov.mc_duration, "simulate this many seconds for a cross-check column");
    c_cov->add_option("--bins,-M", cov.bins)->check(CLI::PositiveNumber);

    cli::ActArgs act;
    auto* c_act = app.add_subcommand("act-plan", "adaptive charging-time plans");
    add_common(*c_act, common);
    std::string act_kind = "cdc";
    c_act->add_option("--kind", act_kind, "cdc or cve")->check(CLI::IsMember({"cdc", "cve"}, CLI::ignore_case));
    c_act->add_option("--theta", act.theta, "CDC multiplier");
    c_act->add_option("--vartheta", act.vartheta, "CVE multiplier of the operating voltage");
    c_act->add_option("--bins,-M", act.bins)->check(CLI::PositiveNumber);

    cli::SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "event-driven network simulation");
    add_common(*c_sim, common);
    c_sim->add_option("--duration", sim.duration, "simulated seconds after warm-up")->check(CLI::PositiveNumber);
    std::string overlap = "instant";
    std::string energy_rule = "completion";
    c_sim->add_option("--overlap", overlap, "instant, any or fractional")
        ->check(CLI::IsMember({"instant", "any", "fractional"}));
    c_sim->add_option("--energy-rule", energy_rule, "completion or skip")->check(CLI::IsMember({"completion", "skip"}));
    c_sim->add_option("--probes", sim.probes_per_ring, "extra devices per ring on the mid-radius circle")
        ->check(CLI::NonNegativeNumber);
    c_sim->add_flag("--devices", sim.device_dump, "also write the per-device CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        act.kind = act_kind_from_string(act_kind);
        sim.overlap = overlap_mode_from_string(overlap);
        sim.energy_rule = energy_rule_from_string(energy_rule);
        cli::CommandResult r;
        if (c_trace->parsed()) r = cli::cmd_capacitor_trace(common, trace);
        else if (c_steady->parsed()) r = cli::cmd_steady_state(common, steady);
        else if (c_sweep->parsed()) r = cli::cmd_outage_sweep(common, sweep);
        else if (c_cov->parsed()) r = cli::cmd_coverage(common, cov);
        else if (c_act->parsed()) r = cli::cmd_act_plan(common, act);
        else if (c_sim->parsed()) r = cli::cmd_simulate(common, sim);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << r.summary;
        for (const auto& p : r.outputs) std::cout << "wrote " << p.string() << '\n';
        std::cout << "wrote " << r.manifest.string() << '\n';
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
