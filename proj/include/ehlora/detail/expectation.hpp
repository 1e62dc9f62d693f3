#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ehlora/error.hpp"

namespace ehlora {

// E[g(nu)] = \int_0^1 g(Q(u)) du with Q the quantile function. The quantile
// map turns the Weibull half-line and the density singularity at 0 (k < 1)
// into a bounded integrand on [0, 1], which tanh-sinh handles well.
template <class F>
double expect_over_charging(const ChargingScheme& s, F&& g, double rel_tol) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
    double error = 0.0;
    double l1 = 0.0;
    auto integrand = [&](double u) {
        const double v = g(s.quantile(u));
        return std::isfinite(v) ? v : 0.0;
    };
    const double result = integrator.integrate(integrand, 0.0, 1.0, rel_tol * 1e-2, &error, &l1);
    if (!std::isfinite(result) || error > rel_tol * std::max(std::abs(result), 1e-300) + 1e-15) {
        throw NumericalError("quadrature over the charging-time distribution did not converge (error estimate " +
                             std::to_string(error) + ")");
    }
    return result;
}

}  // namespace ehlora
