#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ehlora/act.hpp"
#include "ehlora/config.hpp"
#include "ehlora/markov.hpp"
#include "ehlora/montecarlo.hpp"

namespace ehlora::cli {

constexpr const char* kToolVersion = "0.1.0";

struct CommonOptions {
    std::optional<std::filesystem::path> config;  // falls back to $EHLORA_CONFIG, then built-in defaults
    std::uint64_t seed = 1;
    std::filesystem::path out = ".";
    std::optional<CapacitorMode> mode;
    std::optional<ChargingKind> scheme;  // restricts commands that otherwise run both
    int threads = 1;
};

struct CommandResult {
    std::vector<std::filesystem::path> outputs;
    std::filesystem::path manifest;
    std::vector<std::string> warnings;
    std::string summary;  // human-readable, printed to stdout
};

Config resolve_config(const CommonOptions& common);

struct TraceArgs {
    std::size_t cycles = 100;
    int sf = 10;
    int samples_per_phase = 20;
};
CommandResult cmd_capacitor_trace(const CommonOptions& common, const TraceArgs& args);

struct SteadyStateArgs {
    std::optional<int> bins;  // default: config [markov] bins
    int sf = 10;
    TransitionConstruction construction = TransitionConstruction::DensityAtCenter;
};
CommandResult cmd_steady_state(const CommonOptions& common, const SteadyStateArgs& args);

struct SweepArgs {
    std::optional<int> bins;
};
CommandResult cmd_outage_sweep(const CommonOptions& common, const SweepArgs& args);

struct CoverageArgs {
    int points = 120;
    bool upper = false;
    int upper_samples = 20000;
    DutyModel duty = DutyModel::PerCycleMean;
    double mc_duration = 0.0;  // > 0 adds the Monte Carlo cross-check columns
    std::optional<int> bins;
};
CommandResult cmd_coverage(const CommonOptions& common, const CoverageArgs& args);

struct ActArgs {
    ActKind kind = ActKind::ConstantDutyCycle;
    double theta = 150.0;
    double vartheta = 1.0;
    std::optional<int> bins;
};
CommandResult cmd_act_plan(const CommonOptions& common, const ActArgs& args);

struct SimulateArgs {
    double duration = 1e5;
    OverlapMode overlap = OverlapMode::Instant;
    EnergyRule energy_rule = EnergyRule::CompletionCheck;
    int probes_per_ring = 0;
    bool device_dump = false;
};
CommandResult cmd_simulate(const CommonOptions& common, const SimulateArgs& args);

// Process exit code for a library error.
int exit_code_for(const Error& e);

}  // namespace ehlora::cli
