#pragma once

// Ranging performance: SINR, success probabilities, spatial success and the
// duty-cycle optimum.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "radarsg/errors.hpp"
#include "radarsg/inversion.hpp"
#include "radarsg/model.hpp"
#include "radarsg/numerics.hpp"
#include "radarsg/specfun.hpp"
#include "radarsg/z0.hpp"

namespace radarsg::performance {

enum class CurveKind { PsVsRange, BetaVsDensity, XiStarVsN };

inline const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::PsVsRange: return "ps_vs_range";
        case CurveKind::BetaVsDensity: return "beta_vs_density";
        case CurveKind::XiStarVsN: return "xi_star_vs_n";
    }
    return "unknown";
}

struct PerformanceCurve {
    std::vector<double> abscissa;  // R [m], lambda_I [1/m] or n
    std::vector<double> values;
    CurveKind kind = CurveKind::PsVsRange;
    // Monte Carlo curves carry a 99% interval per point; empty otherwise.
    std::vector<double> ci_lower;
    std::vector<double> ci_upper;

    void validate() const {
        if (abscissa.size() != values.size()) throw InvariantError("values", "one value per abscissa");
        for (std::size_t i = 1; i < abscissa.size(); ++i) {
            if (!(abscissa[i] > abscissa[i - 1])) throw InvariantError("abscissa", "must be strictly increasing");
        }
        if (kind != CurveKind::BetaVsDensity) {
            for (double v : values) {
                if (!(v >= 0.0 && v <= 1.0)) throw InvariantError("values", "probabilities must be in [0, 1]");
            }
        }
    }
};

struct OptimizationResult {
    double lambda_i_star = 0.0;  // [1/m]
    double xi_star = 0.0;
    double beta_star = 0.0;      // [1/m]
    bool clamped = false;        // z0 / (lambda C) >= 1
};

inline double sinr(double signal, double interference, double noise) {
    if (!(interference >= 0.0) || !(noise >= 0.0)) throw DomainError("sinr: interference and noise must be >= 0");
    if (interference + noise == 0.0) throw DomainError("sinr: interference plus noise is zero");
    return signal / (interference + noise);
}

// S = gamma1 gamma2 P0 R^(-2 alpha)
inline double ranging_signal(const DerivedConstants& consts, double range_r) {
    if (!(range_r > 0.0)) throw DomainError("ranging_signal: R must be > 0");
    return consts.gamma1 * consts.gamma2 * consts.radar.tx_power *
           std::pow(range_r, -2.0 * consts.radar.pathloss_exp);
}

// Largest interference that still leaves SINR >= T: S/T - N.
inline double interference_budget(const DerivedConstants& consts, double range_r, double noise) {
    return ranging_signal(consts, range_r) / consts.radar.sinr_threshold - noise;
}

// p_s = F_I(S/T - N); zero when the budget is not positive.
inline double p_success(const std::function<double(double)>& cdf, const DerivedConstants& consts, double range_r,
                        double noise) {
    if (range_r == 0.0) return 1.0;
    const double x = interference_budget(consts, range_r, noise);
    if (!(x > 0.0)) return 0.0;
    if (std::isinf(x)) return 1.0;
    return std::clamp(cdf(x), 0.0, 1.0);
}

// Curve version. Outside the tabulated range the curve is extended only where
// it has already saturated at 0 or 1.
inline double p_success(const DistributionCurve& cdf, const DerivedConstants& consts, double range_r, double noise) {
    return p_success(
        [&cdf](double x) {
            if (x < cdf.grid.front()) {
                if (cdf.cdf.front() <= std::max(cdf.tolerance, 1e-12)) return 0.0;
                throw DomainError("p_success: interference budget below the tabulated CDF range");
            }
            if (x > cdf.grid.back()) {
                if (cdf.method == CdfMethod::Empirical || cdf.cdf.back() >= 1.0 - std::max(cdf.tolerance, 1e-12)) {
                    return cdf.cdf.back();
                }
                throw DomainError("p_success: interference budget above the tabulated CDF range");
            }
            return cdf(x);
        },
        consts, range_r, noise);
}

inline PerformanceCurve p_success_curve(const std::function<double(double)>& cdf, const DerivedConstants& consts,
                                        const std::vector<double>& ranges, double noise) {
    PerformanceCurve c{ranges, {}, CurveKind::PsVsRange, {}, {}};
    for (double r : ranges) c.values.push_back(p_success(cdf, consts, r, noise));
    c.validate();
    return c;
}

// Worst-case (Levy) success probability with noise:
// erfc(sqrt((pi/4) (xi lambda)^2 gamma1 P0 / (S/T - N))), zero when S/T <= N.
inline double p_success_wc(const DerivedConstants& consts, double range_r, const MediumAccess& access,
                           const Lane& lane, double noise) {
    if (range_r == 0.0) return 1.0;
    const double budget = interference_budget(consts, range_r, noise);
    if (!(budget > 0.0)) return 0.0;
    const double li = access.duty_cycle * lane.density;
    return std::erfc(std::sqrt(0.25 * kPi * li * li * consts.gamma1 * consts.radar.tx_power / budget));
}

// Interference-limited worst case: erfc(sqrt(pi T / 4 gamma2) xi lambda R^2).
inline double p_success_il(const DerivedConstants& consts, double range_r, const MediumAccess& access,
                           const Lane& lane) {
    if (!(range_r >= 0.0)) throw DomainError("p_success_il: R must be >= 0");
    return std::erfc(consts.c_coeff * access.duty_cycle * lane.density * range_r * range_r);
}

// beta = lambda_I erfc(C lambda_I)
inline double spatial_success(double lambda_i, const DerivedConstants& consts, double range_r) {
    if (!(lambda_i >= 0.0)) throw DomainError("spatial_success: lambda_I must be >= 0");
    return lambda_i * std::erfc(consts.big_c(range_r) * lambda_i);
}

inline double spatial_success(const Lane& lane, const MediumAccess& access, const DerivedConstants& consts,
                              double range_r) {
    return spatial_success(access.duty_cycle * lane.density, consts, range_r);
}

inline PerformanceCurve spatial_success_curve(const std::vector<double>& lambda_grid, const DerivedConstants& consts,
                                              double range_r) {
    PerformanceCurve c{lambda_grid, {}, CurveKind::BetaVsDensity, {}, {}};
    for (double li : lambda_grid) c.values.push_back(spatial_success(li, consts, range_r));
    c.validate();
    return c;
}

// xi* = min(z0 / (lambda C), 1)
inline OptimizationResult optimal_duty_cycle(const Lane& lane, const DerivedConstants& consts, double range_r) {
    if (!(lane.density > 0.0)) throw DomainError("optimal_duty_cycle: lambda must be > 0");
    if (!(range_r > 0.0)) throw DomainError("optimal_duty_cycle: R must be > 0");
    const double big_c = consts.big_c(range_r);
    const double ratio = z0() / (lane.density * big_c);
    OptimizationResult r;
    r.clamped = ratio >= 1.0;
    r.xi_star = std::min(ratio, 1.0);
    r.lambda_i_star = lane.density * r.xi_star;
    r.beta_star = r.lambda_i_star * std::erfc(big_c * r.lambda_i_star);
    return r;
}

// Distance to the nth nearest vehicle in a PPP of intensity lambda:
// e^(-lambda r) (lambda r)^n / (r Gamma(n)).
inline double nn_distance_pdf(const Lane& lane, int n, double r) {
    if (n < 1) throw DomainError("nn_distance_pdf: n must be >= 1");
    if (!(r > 0.0)) throw DomainError("nn_distance_pdf: r must be > 0");
    const double lr = lane.density * r;
    return std::exp(-lr + n * std::log(lr) - std::lgamma(static_cast<double>(n))) / r;
}

// E[min(K / (lambda R_n^2), 1)] over the nth-neighbour distance R_n. The
// closed form [lambda K Gamma(n-2, x) - Gamma(n, x) + Gamma(n)] / Gamma(n),
// x = sqrt(K lambda), is evaluated through regularized incomplete gammas.
inline double expected_optimal_duty_cycle(const Lane& lane, const DerivedConstants& consts, int n) {
    if (n < 3) throw DomainError("expected_optimal_duty_cycle: closed form requires n >= 3");
    const double lk = lane.density * consts.big_k;
    const double x = std::sqrt(lk);
    const double nn = static_cast<double>(n);
    return lk * boost::math::gamma_q(nn - 2.0, x) / ((nn - 1.0) * (nn - 2.0)) + boost::math::gamma_p(nn, x);
}

// Same expectation by quadrature over the nth-neighbour density; any n >= 1.
inline double expected_optimal_duty_cycle_quadrature(const Lane& lane, const DerivedConstants& consts, int n) {
    if (n < 1) throw DomainError("expected_optimal_duty_cycle: n must be >= 1");
    const double lambda = lane.density;
    const double r_star = std::sqrt(consts.big_k / lambda);
    const auto f = [&](double r) { return r > 0.0 ? nn_distance_pdf(lane, n, r) : 0.0; };
    const double near = numerics::adaptive(f, 0.0, r_star, 1e-13);
    const auto g = [&](double r) {
        const double p = f(r);
        return p == 0.0 ? 0.0 : consts.big_k / (lambda * r * r) * p;
    };
    // the density peaks near (n - 1) / lambda; cover its bulk explicitly
    const double nn = static_cast<double>(n);
    const double bulk = (nn + 12.0 * std::sqrt(nn) + 40.0) / lambda;
    double far = 0.0;
    double lo = r_star;
    if (bulk > r_star) {
        const int pieces = 16;
        const double step = (bulk - r_star) / pieces;
        for (int i = 0; i < pieces; ++i, lo += step) far += numerics::adaptive(g, lo, lo + step, 1e-13);
        lo = bulk;
    }
    far += numerics::exp_sinh(g, lo, 1e-13);
    return near + far;
}

// lambda K / n^2
inline double duty_cycle_asymptote(const Lane& lane, const DerivedConstants& consts, int n) {
    if (n < 1) throw DomainError("duty_cycle_asymptote: n must be >= 1");
    return lane.density * consts.big_k / (static_cast<double>(n) * n);
}

inline PerformanceCurve duty_cycle_curve(const Lane& lane, const DerivedConstants& consts,
                                         const std::vector<int>& orders) {
    PerformanceCurve c{{}, {}, CurveKind::XiStarVsN, {}, {}};
    for (int n : orders) {
        c.abscissa.push_back(n);
        c.values.push_back(n >= 3 ? expected_optimal_duty_cycle(lane, consts, n)
                                  : expected_optimal_duty_cycle_quadrature(lane, consts, n));
    }
    c.validate();
    return c;
}

}  // namespace radarsg::performance
