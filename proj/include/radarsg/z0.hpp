#pragma once

#include <cmath>

#include "radarsg/errors.hpp"
#include "radarsg/numerics.hpp"

namespace radarsg::performance {

// Stationarity condition of beta(z) = z erfc(z): erfc(z) = 2 z e^(-z^2) / sqrt(pi).
inline double z0_residual(double z) {
    return std::erfc(z) - 2.0 * z * std::exp(-z * z) / std::sqrt(kPi);
}

namespace detail {
inline double bracketed_z0(double tol) {
    constexpr double lo = 0.1;
    constexpr double hi = 1.0;
    if (!(z0_residual(lo) > 0.0 && z0_residual(hi) < 0.0)) {
        throw ConvergenceError("solve_z0: bracket lost its sign change", lo);
    }
    return numerics::solve_bracketed(z0_residual, lo, hi, tol);
}
}  // namespace detail

// Unique root of z0_residual on [0.1, 1.0]; z0 ~ 0.5316.
inline double solve_z0(double tol = 1e-12) {
    if (!(tol >= 1e-12)) throw DomainError("solve_z0: tolerance must be >= 1e-12");
    return detail::bracketed_z0(tol);
}

// Cached root at full double precision.
inline double z0() {
    static const double value = detail::bracketed_z0(1e-16);
    return value;
}

}  // namespace radarsg::performance
