#pragma once

// Special functions needed by the interference and performance formulas.
//
// All functions are pure and thread-safe. Accuracy targets are absolute and
// relative 1e-10 unless stated otherwise; the contour integral behind
// expint_gen targets 1e-10 relative but is only relied upon to 1e-8.

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "radarsg/errors.hpp"
#include "radarsg/numerics.hpp"

namespace radarsg::specfun {

struct AccuracyTarget {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;

    void validate() const {
        if (!(abs_tol > 0.0 && abs_tol <= 1e-2)) throw InvariantError("abs_tol", "must be in (0, 1e-2]");
        if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) throw InvariantError("rel_tol", "must be in (0, 1e-2]");
    }
};

inline double erfc(double x) { return std::erfc(x); }

// Upper incomplete gamma function Gamma(a, x) = int_x^inf t^(a-1) e^-t dt.
//
// Note: for integer n the identity Gamma(n, x) = (n-1)! e^-x sum_{k<n} x^k/k!
// uses the partial exponential sum up to n-1, not up to n.
inline double gamma_upper(double a, double x) {
    if (!(a > 0.0)) throw DomainError("gamma_upper: requires a > 0");
    if (!(x >= 0.0)) throw DomainError("gamma_upper: requires x >= 0");
    if (x == 0.0) return std::tgamma(a);
    return boost::math::tgamma(a, x);
}

// Hurwitz zeta: sum_{m>=0} (m + a)^-s for s > 1, a > 0.
//
// Terms are summed directly until m + a reaches max(16, s); the remainder is
// the Euler-Maclaurin tail with Bernoulli corrections through B_16, whose
// truncation error at that switch point is below 1e-15 relative.
inline double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0)) throw DomainError("hurwitz_zeta: requires s > 1");
    if (!(a > 0.0)) throw DomainError("hurwitz_zeta: requires a > 0");

    const double switch_at = std::max(16.0, s);
    double sum = 0.0;
    double x = a;
    while (x < switch_at) {
        sum += std::pow(x, -s);
        x += 1.0;
    }

    // sum_{m>=0} f(x+m), f(t) = t^-s
    static constexpr std::array<double, 8> bernoulli = {
        1.0 / 6.0,   -1.0 / 30.0,      1.0 / 42.0, -1.0 / 30.0,
        5.0 / 66.0,  -691.0 / 2730.0,  7.0 / 6.0,  -3617.0 / 510.0};
    double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    // term_k = B_2k / (2k)! * s (s+1) ... (s+2k-2) * x^(-s-2k+1)
    double rising = s;             // s (s+1) ... (s+2k-2)
    double factorial = 2.0;        // (2k)!
    double power = std::pow(x, -s - 1.0);
    const double inv_x2 = 1.0 / (x * x);
    for (std::size_t k = 1; k <= bernoulli.size(); ++k) {
        tail += bernoulli[k - 1] / factorial * rising * power;
        const double kk = static_cast<double>(k);
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        factorial *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        power *= inv_x2;
    }
    return sum + tail;
}

// 2F1(1/2, alpha/2; 3/2; z) for z <= 0.
//
// Equivalently (1/w) int_0^w (1 + t^2)^(-alpha/2) dt with w = sqrt(-z).
// For |z| <= 3 the Pfaff transformation maps the argument to z/(z-1) in
// [0, 3/4] where the series converges geometrically. For larger |z| and
// alpha > 1 the integral is split into its closed-form total minus a tail
// that is a convergent series in 1/w^2. alpha <= 1 with large |z| falls back
// to adaptive quadrature of the integral form.
inline double hyp2f1_neg(double alpha, double z) {
    if (!(z <= 0.0)) throw DomainError("hyp2f1_neg: requires z <= 0");
    if (!std::isfinite(z) || !std::isfinite(alpha)) throw DomainError("hyp2f1_neg: non-finite argument");
    if (z == 0.0) return 1.0;

    const double b = 0.5 * alpha;
    if (-z <= 3.0) {
        const double x = z / (z - 1.0);
        const double a = 0.5;
        const double bp = 1.5 - b;
        const double c = 1.5;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 0; k < 2000; ++k) {
            term *= (a + k) * (bp + k) / ((c + k) * (k + 1.0)) * x;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return std::pow(1.0 - z, -0.5) * sum;
    }

    const double w = std::sqrt(-z);
    if (alpha > 1.0) {
        const double total = std::sqrt(kPi) * std::tgamma(0.5 * (alpha - 1.0)) / (2.0 * std::tgamma(b));
        // int_w^inf (1+t^2)^-b dt = sum_k binom(-b, k) w^(1-alpha-2k) / (alpha-1+2k)
        const double inv_w2 = 1.0 / (w * w);
        double binom = 1.0;
        double power = std::pow(w, 1.0 - alpha);
        double tail = 0.0;
        for (int k = 0; k < 4000; ++k) {
            const double term = binom * power / (alpha - 1.0 + 2.0 * k);
            tail += term;
            if (std::abs(term) < 1e-17 * std::abs(tail)) break;
            binom *= (-b - k) / (k + 1.0);
            power *= inv_w2;
        }
        return (total - tail) / w;
    }

    const auto integrand = [b](double t) { return std::pow(1.0 + t * t, -b); };
    return numerics::adaptive(integrand, 0.0, w, 1e-13, 20) / w;
}

// Generalised exponential integral in the sign convention
//     E(n, z) = int_1^inf e^(z t) / t^n dt,
// i.e. E(n, z) = E_n(-z) with the standard E_n(w) = int_1^inf e^(-w t)/t^n dt.
//
// Converges for Re z < 0 (any n), for Re z = 0, z != 0 (n > 0, conditionally
// when n <= 1) and for z = 0 when n > 1. The integral is evaluated on the ray
// t = 1 + s d, d = -conj(z)/|z|, along which e^(z t) decays like e^(-|z| s);
// Re t >= 1 on the ray so t^-n stays on the principal branch.
inline Complex expint_gen(double n, Complex z) {
    if (!std::isfinite(n) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("expint_gen: non-finite argument");
    }
    if (z.real() > 0.0) throw DivergenceError("expint_gen: diverges for Re z > 0");
    const double mag = std::abs(z);
    if (mag == 0.0) {
        if (n > 1.0) return {1.0 / (n - 1.0), 0.0};
        throw DivergenceError("expint_gen: diverges at z = 0 for n <= 1");
    }
    if (z.real() == 0.0 && !(n > 0.0)) {
        throw DivergenceError("expint_gen: diverges on the imaginary axis for n <= 0");
    }
    const Complex d = -std::conj(z) / mag;
    const Complex scale = d / mag * std::exp(z);
    const auto integrand = [&](double sigma) -> Complex {
        return std::exp(-sigma) * std::pow(1.0 + sigma * d / mag, -n);
    };
    return scale * numerics::exp_sinh(integrand, 0.0, 1e-12);
}

}  // namespace radarsg::specfun
