#include "ehlora/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ehlora/detail/parallel.hpp"
#include "ehlora/error.hpp"

namespace ehlora {

std::string_view to_string(OverlapMode m) {
    switch (m) {
        case OverlapMode::Instant: return "instant";
        case OverlapMode::AnyOverlap: return "any";
        case OverlapMode::Fractional: return "fractional";
    }
    return "instant";
}

OverlapMode overlap_mode_from_string(std::string_view s) {
    if (s == "instant") return OverlapMode::Instant;
    if (s == "any") return OverlapMode::AnyOverlap;
    if (s == "fractional") return OverlapMode::Fractional;
    throw ConfigError("simulate.overlap", "expected instant, any or fractional, got '" + std::string(s) + "'");
}

std::string_view to_string(EnergyRule r) { return r == EnergyRule::CompletionCheck ? "completion" : "skip"; }

EnergyRule energy_rule_from_string(std::string_view s) {
    if (s == "completion") return EnergyRule::CompletionCheck;
    if (s == "skip") return EnergyRule::SkipBelowThreshold;
    throw ConfigError("simulate.energy_rule", "expected completion or skip, got '" + std::string(s) + "'");
}

namespace {

constexpr std::uint64_t kRingStream = 1ULL << 63;
constexpr std::uint64_t kMinCollisionCycles = 100;

double resolve_warmup(const SimOptions& opts, const ChargingScheme& scheme) {
    return opts.warmup < 0 ? 100.0 * scheme.mean() : opts.warmup;
}

// Drives one device through its cycles; `on_cycle` sees every cycle whose
// transmission starts before `duration`.
template <class F>
double evolve_device(std::size_t index, const Device& dev, const PhyConfig& cfg, const CapacitorModel& m,
                     const ChargingScheme& scheme, double duration, double warmup, std::uint64_t seed,
                     EnergyRule rule, F&& on_cycle) {
    Rng rng(seed, index);
    const double v_op = cfg.operating_voltage;
    const double lo = std::min(v_op, m.v_inf_off);
    const double v0 = lo + rng.uniform() * (m.v_inf_off - lo);
    double v = v0;
    double t = -warmup;
    for (;;) {
        const double nu = scheme.sample(rng);
        const double start = t + nu;
        if (!(start < duration)) break;
        DeviceCycle c{t, nu, v, step_charge(v, nu, m), 0.0, true, true};
        if (rule == EnergyRule::SkipBelowThreshold && c.v_charged < v_op) {
            c.transmitted = false;
            c.capable = false;
            c.v_end = c.v_charged;
            t = start;
        } else {
            c.v_end = step_discharge(c.v_charged, dev.airtime, m);
            c.capable = rule == EnergyRule::SkipBelowThreshold || c.v_end > v_op;
            t = start + dev.airtime;
        }
        v = c.v_end;
        on_cycle(c);
    }
    return v0;
}

Proportion proportion(std::uint64_t k, std::uint64_t n, double z) {
    Proportion p;
    p.trials = n;
    if (n == 0) {
        p.value = std::numeric_limits<double>::quiet_NaN();
        p.half_width = std::numeric_limits<double>::quiet_NaN();
        return p;
    }
    p.value = static_cast<double>(k) / static_cast<double>(n);
    p.half_width = z * std::sqrt(p.value * (1.0 - p.value) / static_cast<double>(n));
    return p;
}

struct Transmission {
    double start;
    std::uint32_t device;  // ring-local index
};

struct DeviceRun {
    std::uint64_t cycles = 0;
    std::uint64_t energy_skips = 0;
    double sum_a = 0, sum_t = 0, sum_aa = 0, sum_tt = 0, sum_at = 0, sum_ratio = 0, sum_ratio2 = 0;
    std::vector<double> starts;  // energy-capable transmissions that can reach the window
};

}  // namespace

DeviceTrace trace_device(std::size_t index, const Device& dev, const PhyConfig& cfg, const ChargingScheme& scheme,
                         double duration, std::uint64_t seed, const SimOptions& opts) {
    const CapacitorModel m = build_model(cfg, opts.mode);
    DeviceTrace trace;
    trace.initial_voltage = evolve_device(index, dev, cfg, m, scheme, duration, resolve_warmup(opts, scheme), seed,
                                          opts.energy_rule, [&](const DeviceCycle& c) { trace.cycles.push_back(c); });
    return trace;
}

SimReport run_simulation(const NetworkRealization& net, const PhyConfig& cfg, const ChargingScheme& scheme,
                         double duration, std::uint64_t seed, const SimOptions& opts) {
    if (!(duration > 0)) throw OutOfRangeError("simulation duration must be positive");
    cfg.validate();
    const CapacitorModel m = build_model(cfg, opts.mode);
    const double warmup = resolve_warmup(opts, scheme);

    SimReport report;
    report.duration = duration;
    report.warmup = warmup;
    report.seed = seed;
    report.devices.resize(net.devices.size());
    for (std::size_t i = 0; i < net.devices.size(); ++i) {
        report.devices[i].index = i;
        report.devices[i].device = net.devices[i];
    }

    for (int n = 0; n < kNumRings; ++n) {
        const auto& sf = sf_table()[static_cast<std::size_t>(n)];
        const double tau = sf.airtime;
        RingReport& rr = report.rings[static_cast<std::size_t>(n)];
        rr.ring = n + 1;
        rr.sf = sf.sf;

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < net.devices.size(); ++i) {
            if (net.devices[i].ring == n) members.push_back(i);
        }
        rr.devices = members.size();
        if (members.empty()) continue;

        std::vector<DeviceRun> runs(members.size());
        detail::parallel_blocks(members.size(), opts.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                DeviceRun& run = runs[k];
                const std::size_t idx = members[k];
                evolve_device(idx, net.devices[idx], cfg, m, scheme, duration, warmup, seed, opts.energy_rule,
                              [&](const DeviceCycle& c) {
                                  const double start = c.charge_start + c.nu;
                                  if (c.capable && start + tau > 0.0) run.starts.push_back(start);
                                  if (start < 0.0) return;
                                  ++run.cycles;
                                  if (!c.capable) ++run.energy_skips;
                                  const double a = c.capable ? tau : 0.0;
                                  const double len = c.nu + (c.transmitted ? tau : 0.0);
                                  run.sum_a += a;
                                  run.sum_t += len;
                                  run.sum_aa += a * a;
                                  run.sum_tt += len * len;
                                  run.sum_at += a * len;
                                  const double ratio = len > 0 ? a / len : 0.0;
                                  run.sum_ratio += ratio;
                                  run.sum_ratio2 += ratio * ratio;
                              });
            }
        });

        std::vector<Transmission> txs;
        std::vector<double> gain(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) {
            const DeviceRun& run = runs[k];
            DeviceReport& dr = report.devices[members[k]];
            dr.cycles = run.cycles;
            dr.energy_skips = run.energy_skips;
            dr.attempts = run.cycles - run.energy_skips;
            gain[k] = path_gain(std::max(net.devices[members[k]].distance, kMinDistanceKm), cfg);
            for (double s : run.starts) txs.push_back({s, static_cast<std::uint32_t>(k)});
            rr.sum_a += run.sum_a;
            rr.sum_t += run.sum_t;
            rr.sum_aa += run.sum_aa;
            rr.sum_tt += run.sum_tt;
            rr.sum_at += run.sum_at;
            rr.sum_ratio += run.sum_ratio;
            rr.sum_ratio2 += run.sum_ratio2;
        }
        runs.clear();
        runs.shrink_to_fit();
        std::sort(txs.begin(), txs.end(), [](const Transmission& a, const Transmission& b) {
            return a.start < b.start || (a.start == b.start && a.device < b.device);
        });

        // Gateway sweep: victims in time order, fading drawn from one ring stream.
        Rng fading(seed, kRingStream | static_cast<std::uint64_t>(n));
        const double snr_scale = cfg.noise * sf.snr_threshold / cfg.tx_power;
        for (std::size_t v = 0; v < txs.size(); ++v) {
            const double sv = txs[v].start;
            if (sv < 0.0) continue;
            DeviceReport& dr = report.devices[members[txs[v].device]];
            const double gv = gain[txs[v].device];
            const double h = fading.exponential();
            if (h < snr_scale / gv) {
                ++dr.snr_fails;
                continue;
            }
            double interference = 0.0;
            auto add = [&](std::size_t j, double gap) {
                if (txs[j].device == txs[v].device) return;
                const double w = opts.overlap == OverlapMode::Fractional ? (tau - gap) / tau : 1.0;
                interference += w * fading.exponential() * gain[txs[j].device];
            };
            for (std::size_t j = v; j-- > 0 && txs[j].start > sv - tau;) add(j, sv - txs[j].start);
            for (std::size_t j = v + 1; j < txs.size(); ++j) {
                const double gap = txs[j].start - sv;
                if (opts.overlap == OverlapMode::Instant ? gap > 0.0 : !(gap < tau)) break;
                add(j, gap);
            }
            if (h * gv >= cfg.sir_threshold * interference) {
                ++dr.successes;
            } else {
                ++dr.sir_fails;
            }
        }

        for (std::size_t k = 0; k < members.size(); ++k) {
            const DeviceReport& dr = report.devices[members[k]];
            rr.cycles += dr.cycles;
            rr.energy_skips += dr.energy_skips;
            rr.attempts += dr.attempts;
            rr.snr_fails += dr.snr_fails;
            rr.sir_fails += dr.sir_fails;
            rr.successes += dr.successes;
            if (dr.device.probe) {
                rr.probe_cycles += dr.cycles;
                rr.probe_energy_skips += dr.energy_skips;
                rr.probe_successes += dr.successes;
            }
        }
        rr.energy = proportion(rr.attempts, rr.cycles, opts.ci_z);
        rr.connection = proportion(rr.successes, rr.attempts, opts.ci_z);
        rr.overall = proportion(rr.successes, rr.cycles, opts.ci_z);
        rr.probe_overall = proportion(rr.probe_successes, rr.probe_cycles, opts.ci_z);
    }
    for (auto& rr : report.rings) {
        if (rr.devices == 0) {
            rr.energy = proportion(0, 0, opts.ci_z);
            rr.connection = rr.energy;
            rr.overall = rr.energy;
            rr.probe_overall = rr.energy;
        }
    }
    return report;
}

CollisionEstimate empirical_collision_fraction(const SimReport& report, int ring) {
    if (ring < 0 || ring >= kNumRings) throw OutOfRangeError("ring index outside 0..5");
    const RingReport& rr = report.rings[static_cast<std::size_t>(ring)];
    if (rr.cycles < kMinCollisionCycles) {
        throw StatisticsError(rr.ring, "only " + std::to_string(rr.cycles) + " cycles, need at least " +
                                           std::to_string(kMinCollisionCycles));
    }
    const double n = static_cast<double>(rr.cycles);
    CollisionEstimate e{};
    e.ring = rr.ring;
    e.cycles = rr.cycles;
    e.p_hat = rr.sum_t > 0 ? rr.sum_a / rr.sum_t : 0.0;
    const double resid = std::max(0.0, rr.sum_aa - 2.0 * e.p_hat * rr.sum_at + e.p_hat * e.p_hat * rr.sum_tt);
    const double t_bar = rr.sum_t / n;
    e.std_err = t_bar > 0 ? std::sqrt(resid / (n * (n - 1.0))) / t_bar : 0.0;
    e.per_cycle_mean = rr.sum_ratio / n;
    const double var = std::max(0.0, rr.sum_ratio2 / n - e.per_cycle_mean * e.per_cycle_mean);
    e.per_cycle_std_err = std::sqrt(var / (n - 1.0));
    return e;
}

std::array<CollisionEstimate, kNumRings> empirical_collision_fraction(const SimReport& report) {
    std::array<CollisionEstimate, kNumRings> out{};
    for (int n = 0; n < kNumRings; ++n) out[static_cast<std::size_t>(n)] = empirical_collision_fraction(report, n);
    return out;
}

}  // namespace ehlora
