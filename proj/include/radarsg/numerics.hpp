#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "radarsg/errors.hpp"

namespace radarsg {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.99792458e8;

namespace numerics {

// Fixed N-point Gauss-Legendre rule on [a, b]. Works for real or complex
// integrands.
template <unsigned N, class F>
auto gauss_legendre(F&& f, double a, double b) {
    return boost::math::quadrature::gauss<double, N>::integrate(std::forward<F>(f), a, b);
}

// Abscissae/weights of the N-point rule mapped to [0, 1], full (not folded).
template <unsigned N>
std::vector<std::pair<double, double>> gauss_legendre_unit_nodes() {
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    std::vector<std::pair<double, double>> out;
    out.reserve(N);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            out.emplace_back(0.5, 0.5 * w[i]);
        } else {
            out.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
            out.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Adaptive Gauss-Kronrod on a finite or semi-infinite interval.
template <class F>
auto adaptive(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 15,
              double* error = nullptr) {
    double err = 0.0;
    auto v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        std::forward<F>(f), a, b, max_depth, rel_tol, &err);
    if (error != nullptr) *error = err;
    return v;
}

// Endpoint-singular integrands on a finite interval.
template <class F>
auto tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-12) {
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(std::forward<F>(f), a, b, rel_tol);
}

// Integrands on [a, inf) that decay at least exponentially or algebraically.
template <class F>
auto exp_sinh(F&& f, double a, double rel_tol = 1e-12) {
    static thread_local boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(std::forward<F>(f), a, std::numeric_limits<double>::infinity(),
                                rel_tol);
}

// Root of a continuous function with a sign change on [lo, hi].
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double tol, std::uintmax_t max_iter = 200) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw DomainError("solve_bracketed: no sign change on bracket");
    }
    std::uintmax_t iters = max_iter;
    auto stop = [tol](double a, double b) {
        const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
        return std::abs(b - a) <= std::max(tol, floor);
    };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    return 0.5 * (r.first + r.second);
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n) on up to `threads` workers using contiguous
// blocks. The body must only write to slots owned by its index.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    threads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> failures(threads);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back([begin, end, &body, &slot = failures[t]] {
                try {
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    slot = std::current_exception();
                }
            });
        }
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

}  // namespace numerics
}  // namespace radarsg
