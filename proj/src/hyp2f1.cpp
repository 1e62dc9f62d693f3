#include "ehlora/hyp2f1.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ehlora/error.hpp"

namespace ehlora {

namespace {

constexpr double kRelTol = 1e-16;
constexpr int kMaxTerms = 200000;

[[noreturn]] void no_convergence(const char* branch, double z) {
    throw NumericalError(std::string("2F1 ") + branch + " did not converge at z = " + std::to_string(z));
}

// pi / sin(pi b) - 1 / (1 - b); smooth through b = 1 where both terms diverge.
double reflection_remainder(double b) {
    const double e = 1.0 - b;
    if (std::abs(e) < 1e-3) {
        const double x2 = std::numbers::pi * std::numbers::pi * e * e;
        return std::numbers::pi * std::numbers::pi * e * (1.0 / 6.0 + x2 * (7.0 / 360.0 + x2 * 31.0 / 15120.0));
    }
    return std::numbers::pi / std::sin(std::numbers::pi * b) - 1.0 / e;
}

}  // namespace

namespace hyp2f1_branch {

double direct_series(double b, double z) {
    double sum = 1.0;
    double zn = 1.0;
    for (int n = 1; n < kMaxTerms; ++n) {
        zn *= z;
        const double term = b * zn / (b + n);
        sum += term;
        if (std::abs(term) < kRelTol * std::abs(sum)) return sum;
    }
    no_convergence("direct series", z);
}

double pfaff_series(double b, double z) {
    // 2F1(1, b; 1+b; z) = (1-z)^{-b} 2F1(b, b; 1+b; z/(z-1))
    const double w = z / (z - 1.0);
    double sum = 1.0;
    double term = 1.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        term *= (b + n) * (b + n) / ((1.0 + b + n) * (n + 1.0)) * w;
        sum += term;
        if (std::abs(term) < kRelTol * sum) return std::pow(1.0 - z, -b) * sum;
    }
    no_convergence("Pfaff series", z);
}

double large_argument(double b, double z) {
    // F = b y^{-b} \int_0^y s^{b-1}/(1+s) ds with y = -z, split at infinity:
    //   F = b y^{-b} [R(b) + (1 - y^{b-1})/(1-b)] - b sum_{k>=1} (-1)^k y^{-1-k}/(k+1-b)
    // R(b) = pi/sin(pi b) - 1/(1-b). Both brackets stay finite as b -> 1.
    const double y = -z;
    const double log_y = std::log(y);
    const double e = 1.0 - b;
    const double head = std::abs(e) < 1e-300 ? log_y : -std::expm1(-e * log_y) / e;
    const double lead = b * std::exp(-b * log_y) * (reflection_remainder(b) + head);
    double tail = 0.0;
    double inv = 1.0 / y;  // y^{-1-k} for k = 0
    for (int k = 1; k < kMaxTerms; ++k) {
        inv /= -y;
        const double term = inv / (k + e);
        tail += term;
        if (std::abs(term) < kRelTol * std::abs(lead)) return lead - b * tail;
    }
    no_convergence("large-argument expansion", z);
}

}  // namespace hyp2f1_branch

double hyp2f1_special(double eta, double z) {
    if (!(eta >= 2.0)) throw OutOfRangeError("2F1: path-loss exponent must be >= 2");
    if (!(z <= 0.0)) throw OutOfRangeError("2F1: argument must be <= 0");
    const double b = 2.0 / eta;
    if (z == 0.0) return 1.0;
    if (z > -0.9) return hyp2f1_branch::direct_series(b, z);
    if (z >= -9.0) return hyp2f1_branch::pfaff_series(b, z);
    return hyp2f1_branch::large_argument(b, z);
}

}  // namespace ehlora
