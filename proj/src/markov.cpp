#include "ehlora/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include <Eigen/Dense>

#include "ehlora/error.hpp"

namespace ehlora {

double DecayFactorDistribution::support_lo() const {
    const double hi = scheme.support_hi();
    return std::isinf(hi) ? 0.0 : std::exp(-hi / tau_off);
}

double DecayFactorDistribution::support_hi() const { return std::exp(-scheme.support_lo() / tau_off); }

double DecayFactorDistribution::pdf(double x) const {
    if (!(x > 0.0) || x > 1.0) return 0.0;
    const double nu = -tau_off * std::log(x);
    return tau_off / x * scheme.pdf(nu);
}

double DecayFactorDistribution::cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    if (x >= 1.0) return 1.0;
    return scheme.survival(-tau_off * std::log(x));
}

double expected_decay_factor(const DecayFactorDistribution& d) {
    const auto& s = d.scheme;
    const double rc = d.tau_off;
    if (s.kind() == ChargingKind::Weibull && s.first() == 1.0) return rc / (s.second() + rc);
    if (s.kind() == ChargingKind::Uniform) {
        const double a = s.first();
        const double width = s.second() - a;
        return -rc / width * std::exp(-a / rc) * std::expm1(-width / rc);
    }
    return expect_over_charging(s, [rc](double nu) { return std::exp(-nu / rc); });
}

VoltageGrid VoltageGrid::for_model(const CapacitorModel& m, int bins) {
    if (bins < 1) throw ConfigError("markov.bins", "bin count must be at least 1");
    return {m.v_inf_on, m.v_inf_off, bins};
}

TransitionMatrix::TransitionMatrix(VoltageGrid grid, std::vector<std::size_t> row_ptr, std::vector<int> cols,
                                   std::vector<double> values, std::vector<bool> self_loop_rows)
    : grid_(grid),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      values_(std::move(values)),
      self_loop_rows_(std::move(self_loop_rows)) {}

TransitionMatrix TransitionMatrix::from_dense(const std::vector<std::vector<double>>& rows, VoltageGrid grid) {
    const auto m = rows.size();
    if (m == 0 || static_cast<int>(m) != grid.bins) throw ConfigError("matrix", "dense matrix size must match the grid");
    std::vector<std::size_t> row_ptr{0};
    std::vector<int> cols;
    std::vector<double> values;
    std::vector<bool> self_loops;
    for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].size() != m) throw ConfigError("matrix", "dense matrix must be square");
        const double sum = std::accumulate(rows[i].begin(), rows[i].end(), 0.0);
        if (sum > 0.0) {
            for (std::size_t j = 0; j < m; ++j) {
                if (rows[i][j] < 0.0) throw ConfigError("matrix", "entries must be non-negative");
                if (rows[i][j] > 0.0) {
                    cols.push_back(static_cast<int>(j));
                    values.push_back(rows[i][j] / sum);
                }
            }
            self_loops.push_back(false);
        } else {
            cols.push_back(static_cast<int>(i));
            values.push_back(1.0);
            self_loops.push_back(true);
        }
        row_ptr.push_back(cols.size());
    }
    return TransitionMatrix(grid, std::move(row_ptr), std::move(cols), std::move(values), std::move(self_loops));
}

double TransitionMatrix::at(int i, int j) const {
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[static_cast<std::size_t>(i)]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

double TransitionMatrix::row_sum(int i) const {
    double s = 0.0;
    for_each_in_row(i, [&](int, double v) { s += v; });
    return s;
}

std::vector<bool> TransitionMatrix::reachable() const {
    std::vector<bool> r(static_cast<std::size_t>(size()), false);
    for (int i = 0; i < size(); ++i) {
        if (is_self_loop_row(i)) continue;
        for_each_in_row(i, [&](int j, double v) {
            if (v > 0) r[static_cast<std::size_t>(j)] = true;
        });
    }
    return r;
}

void TransitionMatrix::left_multiply(const std::vector<double>& u, std::vector<double>& out) const {
    out.assign(u.size(), 0.0);
    for (int i = 0; i < size(); ++i) {
        const double ui = u[static_cast<std::size_t>(i)];
        if (ui == 0.0) continue;
        for_each_in_row(i, [&](int j, double v) { out[static_cast<std::size_t>(j)] += ui * v; });
    }
}

namespace {

struct Row {
    std::vector<int> cols;
    std::vector<double> values;
    bool self_loop = false;
};

// One row of the chain from the state at bin center v_i.
Row build_row(int i, const DecayFactorDistribution& d, const CycleConstants& cc, const VoltageGrid& grid,
              const TransitionOptions& opts) {
    Row row;
    const double delta = grid.delta();
    const double vi = grid.center(i);
    const double denom = cc.c2 * (vi - cc.c3);  // < 0 on the grid interior
    const double x_lo = d.support_lo();
    const double x_hi = d.support_hi();
    const int m = grid.bins;

    if (denom < 0.0) {
        // x = (v - c1)/denom is decreasing in v, so the support maps to [v_min, v_max].
        const double v_min = cc.c1 + denom * x_hi;
        const double v_max = cc.c1 + denom * x_lo;
        const double offset = opts.construction == TransitionConstruction::DensityAtCenter ? 0.5 : 0.0;
        const int j0 = std::max(0, static_cast<int>(std::floor((v_min - grid.lo) / delta - offset)));
        const int j1 = std::min(m - 1, static_cast<int>(std::ceil((v_max - grid.lo) / delta - offset)));
        for (int j = j0; j <= j1; ++j) {
            double value = 0.0;
            if (opts.construction == TransitionConstruction::DensityAtCenter) {
                const double x = (grid.center(j) - cc.c1) / denom;
                if (x >= x_lo && x <= x_hi) value = d.pdf(x);
                if (std::isinf(value)) value = std::numeric_limits<double>::max() / m;
            } else {
                const double x_top = (grid.edge(j) - cc.c1) / denom;
                const double x_bottom = (grid.edge(j + 1) - cc.c1) / denom;
                value = std::max(0.0, d.cdf(x_top) - d.cdf(x_bottom));
            }
            if (value > 0.0 && std::isfinite(value)) {
                row.cols.push_back(j);
                row.values.push_back(value);
            }
        }
    }

    if (!row.values.empty()) {
        const double peak = *std::max_element(row.values.begin(), row.values.end());
        std::size_t keep = 0;
        for (std::size_t p = 0; p < row.values.size(); ++p) {
            if (row.values[p] >= opts.drop_tolerance * peak) {
                row.cols[keep] = row.cols[p];
                row.values[keep] = row.values[p];
                ++keep;
            }
        }
        row.cols.resize(keep);
        row.values.resize(keep);
        const double sum = std::accumulate(row.values.begin(), row.values.end(), 0.0);
        for (double& v : row.values) v /= sum;
    }
    if (row.values.empty()) {
        row.self_loop = true;
        row.cols = {i};
        row.values = {1.0};
    }
    return row;
}

TransitionMatrix assemble(const VoltageGrid& grid, std::vector<Row>& rows) {
    std::vector<std::size_t> row_ptr{0};
    std::vector<int> cols;
    std::vector<double> values;
    std::vector<bool> self_loops;
    for (auto& r : rows) {
        cols.insert(cols.end(), r.cols.begin(), r.cols.end());
        values.insert(values.end(), r.values.begin(), r.values.end());
        row_ptr.push_back(cols.size());
        self_loops.push_back(r.self_loop);
    }
    return TransitionMatrix(grid, std::move(row_ptr), std::move(cols), std::move(values), std::move(self_loops));
}

}  // namespace

TransitionMatrix build_transition_matrix(const DecayFactorDistribution& d, const CycleConstants& cc,
                                         const VoltageGrid& grid, const TransitionOptions& opts) {
    const int m = grid.bins;
    if (m < 1) throw ConfigError("markov.bins", "bin count must be at least 1");
    std::vector<Row> rows(static_cast<std::size_t>(m));
    if (m == 1) {
        rows[0] = Row{{0}, {1.0}, false};
        return assemble(grid, rows);
    }

    const int threads = std::clamp(opts.threads, 1, m);
    auto work = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) rows[static_cast<std::size_t>(i)] = build_row(i, d, cc, grid, opts);
    };
    if (threads == 1) {
        work(0, m);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (m + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t * chunk, std::min(m, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    if (std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.self_loop; })) {
        throw ModelError("transition matrix has no feasible transitions");
    }
    return assemble(grid, rows);
}

namespace {

StationaryDistribution power_iteration(const TransitionMatrix& s, const StationaryOptions& opts) {
    const auto m = static_cast<std::size_t>(s.size());
    std::vector<double> u(m, 0.0);
    if (!opts.start.empty()) {
        if (opts.start.size() != m) throw ConfigError("start", "start vector length differs from the bin count");
        u = opts.start;
    } else {
        const auto reach = s.reachable();
        for (std::size_t k = 0; k < m; ++k) u[k] = reach[k] ? 1.0 : 0.0;
        if (std::none_of(reach.begin(), reach.end(), [](bool b) { return b; })) std::fill(u.begin(), u.end(), 1.0);
    }
    const double total = std::accumulate(u.begin(), u.end(), 0.0);
    if (!(total > 0.0)) throw NumericalError("start vector has no mass");
    for (double& x : u) x /= total;

    std::vector<double> next;
    int it = 0;
    for (;; ++it) {
        if (it >= opts.max_iterations) {
            throw NumericalError("power iteration did not converge within " + std::to_string(opts.max_iterations) +
                                 " iterations");
        }
        s.left_multiply(u, next);
        const double sum = std::accumulate(next.begin(), next.end(), 0.0);
        double diff = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            next[k] /= sum;
            diff = std::max(diff, std::abs(next[k] - u[k]));
        }
        u.swap(next);
        if (diff < opts.tolerance) break;
    }
    StationaryDistribution sd;
    sd.grid = s.grid();
    sd.probabilities = std::move(u);
    sd.iterations = it + 1;
    return sd;
}

StationaryDistribution dense_solve(const TransitionMatrix& s) {
    const int m = s.size();
    // Restrict to the reachable states; isolated self-loop rows are absorbing
    // and would otherwise contribute spurious unit eigenvalues.
    const auto reach = s.reachable();
    std::vector<int> index(static_cast<std::size_t>(m), -1);
    std::vector<int> states;
    for (int k = 0; k < m; ++k) {
        if (reach[static_cast<std::size_t>(k)]) {
            index[static_cast<std::size_t>(k)] = static_cast<int>(states.size());
            states.push_back(k);
        }
    }
    if (states.empty()) {
        for (int k = 0; k < m; ++k) {
            index[static_cast<std::size_t>(k)] = k;
            states.push_back(k);
        }
    }
    const auto n = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd st = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        s.for_each_in_row(states[static_cast<std::size_t>(r)], [&](int j, double v) {
            const int c = index[static_cast<std::size_t>(j)];
            if (c >= 0) st(c, r) = v;
        });
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(st);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    const auto& values = solver.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < n; ++k) {
        if (std::abs(values[k] - 1.0) < std::abs(values[best] - 1.0)) best = k;
    }
    const Eigen::VectorXd vec = solver.eigenvectors().col(best).real();
    const double sum = vec.sum();
    StationaryDistribution sd;
    sd.grid = s.grid();
    sd.probabilities.assign(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index r = 0; r < n; ++r) {
        sd.probabilities[static_cast<std::size_t>(states[static_cast<std::size_t>(r)])] = std::max(0.0, vec[r] / sum);
    }
    const double total = std::accumulate(sd.probabilities.begin(), sd.probabilities.end(), 0.0);
    for (double& p : sd.probabilities) p /= total;
    return sd;
}

}  // namespace

StationaryDistribution stationary_distribution(const TransitionMatrix& s, const StationaryOptions& opts) {
    StationaryDistribution sd;
    if (opts.method == StationaryMethod::Dense) {
        if (s.size() > opts.dense_limit) {
            throw ConfigError("markov.method", "dense eigensolve is limited to " + std::to_string(opts.dense_limit) +
                                                   " bins");
        }
        sd = dense_solve(s);
    } else {
        sd = power_iteration(s, opts);
    }
    std::vector<double> next;
    s.left_multiply(sd.probabilities, next);
    for (std::size_t k = 0; k < next.size(); ++k) {
        sd.residual = std::max(sd.residual, std::abs(next[k] - sd.probabilities[k]));
    }
    return sd;
}

double StationaryDistribution::mean() const {
    double acc = 0.0;
    for (int k = 0; k < bins(); ++k) acc += probabilities[static_cast<std::size_t>(k)] * grid.center(k);
    return acc;
}

double StationaryDistribution::stddev() const {
    const double mu = mean();
    double acc = 0.0;
    for (int k = 0; k < bins(); ++k) {
        const double dv = grid.center(k) - mu;
        acc += probabilities[static_cast<std::size_t>(k)] * dv * dv;
    }
    return std::sqrt(acc);
}

int StationaryDistribution::mode_bin() const {
    return static_cast<int>(std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
}

std::vector<double> StationaryDistribution::cdf() const {
    std::vector<double> c(probabilities.size());
    std::partial_sum(probabilities.begin(), probabilities.end(), c.begin());
    return c;
}

double energy_outage(const StationaryDistribution& sd, double v_op) {
    const auto& g = sd.grid;
    if (v_op <= g.lo) return 0.0;
    if (v_op >= g.hi) return 1.0;
    const double pos = (v_op - g.lo) / g.delta();
    const int full = std::min(g.bins - 1, static_cast<int>(std::floor(pos)));
    double acc = 0.0;
    for (int k = 0; k < full; ++k) acc += sd.probabilities[static_cast<std::size_t>(k)];
    acc += sd.probabilities[static_cast<std::size_t>(full)] * (pos - full);
    return std::clamp(acc, 0.0, 1.0);
}

std::vector<std::pair<double, double>> stationary_pdf(const StationaryDistribution& sd) {
    std::vector<std::pair<double, double>> out;
    out.reserve(sd.probabilities.size());
    const double delta = sd.delta();
    for (int k = 0; k < sd.bins(); ++k) {
        out.emplace_back(sd.grid.center(k), sd.probabilities[static_cast<std::size_t>(k)] / delta);
    }
    return out;
}

OutageAnalysis analyze_energy_outage(const CapacitorModel& m, const ChargingScheme& scheme, double airtime,
                                     double v_op, const MarkovOptions& opts) {
    OutageAnalysis a{};
    a.constants = cycle_constants(m, airtime);
    const DecayFactorDistribution decay{scheme, m.tau_off};
    a.expected_decay = expected_decay_factor(decay);
    a.estimator_mean = estimate_mean_voltage(a.expected_decay, a.constants);
    const auto grid = VoltageGrid::for_model(m, opts.bins);
    const auto matrix = build_transition_matrix(decay, a.constants, grid, opts.transition);
    a.stationary = stationary_distribution(matrix, opts.stationary);
    a.outage = energy_outage(a.stationary, v_op);
    return a;
}

std::vector<ConvergencePoint> convergence_report(const CapacitorModel& m, const ChargingScheme& scheme,
                                                 double airtime, double v_op, const std::vector<int>& bins,
                                                 const MarkovOptions& opts) {
    std::vector<ConvergencePoint> out;
    for (int b : bins) {
        MarkovOptions o = opts;
        o.bins = b;
        out.push_back({b, analyze_energy_outage(m, scheme, airtime, v_op, o).outage});
    }
    return out;
}

}  // namespace ehlora
