#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ehlora/capacitor.hpp"
#include "ehlora/phy.hpp"

namespace ehlora {

// Distribution of the per-cycle decay factor X = exp(-nu / tau_off).
struct DecayFactorDistribution {
    ChargingScheme scheme;
    double tau_off;  // charging time constant [s]

    double support_lo() const;
    double support_hi() const;
    // f_X(x) = (tau_off / x) f_nu(-tau_off ln x)
    double pdf(double x) const;
    // P[X <= x] = P[nu >= -tau_off ln x]
    double cdf(double x) const;
};

double expected_decay_factor(const DecayFactorDistribution& d);

// M equal bins over [lo, hi]; bin k (0-based) covers [lo + k delta, lo + (k+1) delta].
struct VoltageGrid {
    double lo;
    double hi;
    int bins;

    static VoltageGrid for_model(const CapacitorModel& m, int bins);

    double delta() const { return (hi - lo) / bins; }
    double center(int k) const { return lo + (k + 0.5) * delta(); }
    double edge(int k) const { return k == bins ? hi : lo + k * delta(); }
};

enum class TransitionConstruction {
    DensityAtCenter,  // f_X at bin-center pairs, then row-normalised
    CdfMass,          // exact probability mass of each destination bin
};

// Row-stochastic matrix in compressed sparse row form.
class TransitionMatrix {
public:
    TransitionMatrix(VoltageGrid grid, std::vector<std::size_t> row_ptr, std::vector<int> cols,
                     std::vector<double> values, std::vector<bool> self_loop_rows);

    // Row-normalises a dense matrix; all-zero rows get the self-loop convention.
    static TransitionMatrix from_dense(const std::vector<std::vector<double>>& rows, VoltageGrid grid);

    int size() const { return grid_.bins; }
    const VoltageGrid& grid() const { return grid_; }
    double at(int i, int j) const;
    double row_sum(int i) const;
    std::size_t nonzeros() const { return values_.size(); }
    // Rows that had no feasible transition and received the self-loop convention.
    bool is_self_loop_row(int i) const { return self_loop_rows_[static_cast<std::size_t>(i)]; }
    // States with at least one incoming transition from a feasible row.
    std::vector<bool> reachable() const;

    // out = u^T S.
    void left_multiply(const std::vector<double>& u, std::vector<double>& out) const;

    template <class F>
    void for_each_in_row(int i, F&& f) const {
        for (std::size_t p = row_ptr_[static_cast<std::size_t>(i)]; p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
            f(cols_[p], values_[p]);
        }
    }

private:
    VoltageGrid grid_;
    std::vector<std::size_t> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> values_;
    std::vector<bool> self_loop_rows_;
};

struct TransitionOptions {
    TransitionConstruction construction = TransitionConstruction::DensityAtCenter;
    // Entries below this fraction of their row maximum are dropped before
    // normalisation (keeps long Weibull tails from densifying the matrix).
    double drop_tolerance = 1e-16;
    int threads = 1;
};

TransitionMatrix build_transition_matrix(const DecayFactorDistribution& d, const CycleConstants& cc,
                                         const VoltageGrid& grid, const TransitionOptions& opts = {});

enum class StationaryMethod { PowerIteration, Dense };

struct StationaryOptions {
    StationaryMethod method = StationaryMethod::PowerIteration;
    int max_iterations = 100000;
    double tolerance = 1e-14;  // L-infinity change between iterates
    int dense_limit = 512;
    std::vector<double> start;  // optional start vector, power iteration only
};

struct StationaryDistribution {
    VoltageGrid grid;
    std::vector<double> probabilities;
    int iterations = 0;
    double residual = 0.0;  // ||u^T S - u^T||_inf

    int bins() const { return grid.bins; }
    double delta() const { return grid.delta(); }
    double mean() const;
    double stddev() const;
    int mode_bin() const;
    // P[v <= upper edge of bin k], k = 0..M-1
    std::vector<double> cdf() const;
};

StationaryDistribution stationary_distribution(const TransitionMatrix& s, const StationaryOptions& opts = {});

// P[v <= v_op] with linear interpolation inside the bin that straddles v_op.
double energy_outage(const StationaryDistribution& sd, double v_op);

// (bin center, u_k / delta) pairs.
std::vector<std::pair<double, double>> stationary_pdf(const StationaryDistribution& sd);

struct MarkovOptions {
    int bins = 2000;
    TransitionOptions transition;
    StationaryOptions stationary;
};

// Everything needed to report one (model, scheme, airtime) chain.
struct OutageAnalysis {
    CycleConstants constants;
    double expected_decay;
    double estimator_mean;
    StationaryDistribution stationary;
    double outage;
};

OutageAnalysis analyze_energy_outage(const CapacitorModel& m, const ChargingScheme& scheme, double airtime,
                                     double v_op, const MarkovOptions& opts = {});

struct ConvergencePoint {
    int bins;
    double outage;
};

std::vector<ConvergencePoint> convergence_report(const CapacitorModel& m, const ChargingScheme& scheme,
                                                 double airtime, double v_op, const std::vector<int>& bins,
                                                 const MarkovOptions& opts = {});

}  // namespace ehlora
