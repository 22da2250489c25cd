#pragma once

// Interference statistics: aggregate power of a realization, means,
// characteristic functions, the lattice Laplace transform and the CDFs built
// on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "radarsg/errors.hpp"
#include "radarsg/geometry.hpp"
#include "radarsg/inversion.hpp"
#include "radarsg/model.hpp"
#include "radarsg/numerics.hpp"
#include "radarsg/specfun.hpp"

namespace radarsg::interference {

// Sum of gamma1 P0 g u^-alpha over the pattern, u = sqrt(x^2 + L^2).
inline double aggregate_interference(const geometry::PointPattern& pattern, const DerivedConstants& consts,
                                     const std::vector<double>& fading_draws) {
    if (!fading_draws.empty() && fading_draws.size() != pattern.size()) {
        throw DomainError("aggregate_interference: one fading draw per point is required");
    }
    const double gp = consts.gamma1 * consts.radar.tx_power;
    const double alpha = consts.radar.pathloss_exp;
    const double l2 = consts.offset * consts.offset;
    double sum = 0.0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const double x = pattern.positions[i];
        const double d2 = x * x + l2;
        const double path = alpha == 2.0 ? 1.0 / d2 : std::pow(d2, -0.5 * alpha);
        sum += (fading_draws.empty() ? 1.0 : fading_draws[i]) * path;
    }
    return gp * sum;
}

inline double aggregate_interference(const geometry::PointPattern& pattern, const DerivedConstants& consts) {
    return aggregate_interference(pattern, consts, {});
}

// ---------------------------------------------------------------- means

namespace detail {
inline void check_alpha(double alpha) {
    if (!(alpha > 1.0)) throw DomainError("mean interference requires alpha > 1");
}

// int_delta^inf (L^2 + r^2)^(-alpha/2) dr for L > 0
inline double offset_path_integral(double alpha, double delta, double offset) {
    const double total = 2.0 * std::sqrt(kPi) * offset * std::tgamma(0.5 * (alpha + 3.0)) /
                         ((alpha * alpha - 1.0) * std::tgamma(0.5 * alpha));
    const double guard = delta * specfun::hyp2f1_neg(alpha, -(delta * delta) / (offset * offset));
    return std::pow(offset, -alpha) * (total - guard);
}
}  // namespace detail

// Campbell mean with lane offset, L > 0.
inline double mean_ppp_exact(const DerivedConstants& consts, const Lane& lane, const MediumAccess& access) {
    const double alpha = consts.radar.pathloss_exp;
    detail::check_alpha(alpha);
    if (!(consts.offset > 0.0)) throw DomainError("mean_ppp_exact: requires L > 0 (use mean_simplified)");
    const double lambda_i = access.duty_cycle * lane.density;
    return lambda_i * consts.gamma1 * consts.radar.tx_power *
           detail::offset_path_integral(alpha, consts.delta_o, consts.offset);
}

// Mean with the lane offset neglected in the distance: xi lambda gamma1 P0 / ((alpha-1) delta_o^(alpha-1)).
inline double mean_simplified(const DerivedConstants& consts, const Lane& lane, const MediumAccess& access) {
    const double alpha = consts.radar.pathloss_exp;
    detail::check_alpha(alpha);
    if (!(consts.delta_o > 0.0)) throw DomainError("mean_simplified: requires delta_o > 0");
    const double lambda_i = access.duty_cycle * lane.density;
    return lambda_i * consts.gamma1 * consts.radar.tx_power / ((alpha - 1.0) * std::pow(consts.delta_o, alpha - 1.0));
}

// Lattice mean. With L = 0 the translation average of the Hurwitz zeta sum
// collapses to xi gamma1 P0 delta^-alpha A^(1-alpha)/(alpha-1), A = delta_o/delta.
// With L > 0 the first sites are averaged over the translation numerically
// and the remaining sites contribute their exact continuum integral.
inline double mean_bl(const DerivedConstants& consts, const Lane& lane, const MediumAccess& access) {
    const double alpha = consts.radar.pathloss_exp;
    detail::check_alpha(alpha);
    const double xi = access.duty_cycle;
    const double gp = consts.gamma1 * consts.radar.tx_power;
    const double spacing = 1.0 / lane.density;
    if (xi == 0.0) return 0.0;
    if (consts.offset == 0.0) {
        if (!(consts.delta_o > 0.0)) throw DomainError("mean_bl: requires delta_o > 0 when L = 0");
        const double a = consts.delta_o / spacing;
        return xi * gp * std::pow(spacing, -alpha) * std::pow(a, 1.0 - alpha) / (alpha - 1.0);
    }
    constexpr int kSites = 64;
    const double l2 = consts.offset * consts.offset;
    double head = 0.0;
    for (int m = 0; m < kSites; ++m) {
        head += numerics::gauss_legendre<16>(
            [&](double u) {
                const double x = consts.delta_o + (m + u) * spacing;
                return std::pow(l2 + x * x, -0.5 * alpha);
            },
            0.0, 1.0);
    }
    const double tail = detail::offset_path_integral(alpha, consts.delta_o + kSites * spacing, consts.offset) / spacing;
    return xi * gp * (head + tail);
}

// ---------------------------------------------------------------- CF spec

struct LaneTerm {
    double intensity = 0.0;  // lambda_I = xi lambda
    double spacing = 0.0;    // lattice spacing 1/lambda
    double duty_cycle = 0.0;
    double delta_o = 0.0;
    double offset = 0.0;     // L used in the distance
};

struct CfSpec {
    Geometry geometry = Geometry::PPP;
    std::vector<LaneTerm> lanes;
    double gamma_p0 = 0.0;  // gamma1 P0
    double alpha = 2.0;
    FadingModel fading;

    static CfSpec from_scenario(const Scenario& s) {
        s.validate();
        CfSpec spec;
        spec.geometry = s.geometry;
        spec.alpha = s.radar.pathloss_exp;
        spec.fading = s.fading;
        for (std::size_t i = 0; i < s.lanes.size(); ++i) {
            const auto d = derive(s, i);
            spec.gamma_p0 = d.gamma1 * s.radar.tx_power;
            spec.lanes.push_back({s.access.duty_cycle * s.lanes[i].density, 1.0 / s.lanes[i].density,
                                  s.access.duty_cycle, d.delta_o, d.offset});
        }
        return spec;
    }

    // delta_o = 0, L = 0, alpha = 2, no fading.
    CfSpec worst_case() const {
        CfSpec w = *this;
        w.alpha = 2.0;
        w.fading = FadingModel::unit();
        for (auto& l : w.lanes) {
            l.delta_o = 0.0;
            l.offset = 0.0;
        }
        return w;
    }

    bool is_worst_case() const {
        if (alpha != 2.0 || !fading.is_unit()) return false;
        return std::all_of(lanes.begin(), lanes.end(),
                           [](const LaneTerm& l) { return l.delta_o == 0.0 && l.offset == 0.0; });
    }

    double total_intensity() const {
        double s = 0.0;
        for (const auto& l : lanes) s += l.intensity;
        return s;
    }

    void validate() const {
        if (lanes.empty()) throw InvariantError("lanes", "at least one lane is required");
        if (!(gamma_p0 > 0.0)) throw InvariantError("gamma_p0", "must be > 0");
        if (!(alpha > 1.0)) throw InvariantError("pathloss_exp", "must be > 1");
        for (const auto& l : lanes) {
            if (!(l.intensity >= 0.0)) throw InvariantError("intensity", "must be >= 0");
            if (!(l.delta_o >= 0.0)) throw InvariantError("delta_o", "must be >= 0");
            if (!(l.offset >= 0.0)) throw InvariantError("offset", "must be >= 0");
        }
    }
};

// ---------------------------------------------------------------- PPP CF

struct CfOptions {
    double v_cut = 400.0;    // oscillatory phase beyond which the asymptotic tail is used
    double rel_tol = 1e-10;  // inner quadrature tolerance
};

namespace detail {

// J(w) = int_delta_o^inf [1 - psi(a (L^2 + u^2)^(-alpha/2))] du for a = w gamma1 P0 > 0,
// evaluated in the phase variable v = a (L^2+u^2)^(-alpha/2), du = -w(v) dv.
class PppExponent {
public:
    PppExponent(double a, double alpha, double delta_o, double offset, const FadingModel& fading,
                const CfOptions& opt)
        : a_(a), alpha_(alpha), c_(2.0 / alpha), delta_o_(delta_o), l2_(offset * offset), fading_(fading), opt_(opt) {
        const double base = l2_ + delta_o * delta_o;
        v_max_ = base == 0.0 ? std::numeric_limits<double>::infinity() : a * std::pow(base, -0.5 * alpha);
        singular_end_ = delta_o == 0.0 && offset > 0.0;
    }

    Complex operator()() const {
        const Complex head = numerics::tanh_sinh(
            [this](double v) { return one_minus_psi_over_v(v) * kernel(v); }, 0.0, std::min(1.0, v_max_),
            opt_.rel_tol);
        if (v_max_ <= 1.0) return head;
        const double one_part = u_of(1.0) - delta_o_;
        return head + one_part - psi_part();
    }

private:
    double q_of(double v) const { return std::pow(a_ / v, c_); }
    double u_of(double v) const { return std::sqrt(std::max(0.0, q_of(v) - l2_)); }

    // v w(v) = q / (alpha u), written to stay finite as v -> 0
    double kernel(double v) const {
        const double q = q_of(v);
        if (!std::isfinite(q)) {
            // u ~ sqrt(q) once L^2 is negligible
            return std::exp(0.5 * c_ * (std::log(a_) - std::log(v))) / alpha_;
        }
        return q / (alpha_ * std::sqrt(std::max(q - l2_, 0.0)));
    }

    double w(double v) const { return kernel(v) / v; }

    Complex psi(double v) const {
        if (fading_.is_unit()) return std::exp(Complex(0.0, v));
        return fading_.char_fn(Complex(v, 0.0));
    }

    Complex one_minus_psi_over_v(double v) const {
        if (fading_.is_unit()) {
            // 1 - e^(jv) = -2j sin(v/2) e^(jv/2)
            const double h = 0.5 * v;
            const double sinc = h == 0.0 ? 1.0 : std::sin(h) / h;
            return Complex(0.0, -1.0) * sinc * std::exp(Complex(0.0, h));
        }
        return (1.0 - psi(v)) / v;
    }

    // e^(jv) (-j w + w' + j w''), the three-term endpoint expansion of int e^(jv) w dv
    Complex ibp_antiderivative(double v) const {
        const double q = q_of(v);
        const double wv = w(v);
        const double r = q / (q - l2_);
        const double g = (-(c_ + 1.0) + 0.5 * c_ * r) / v;
        const double dr = c_ * l2_ * q / (v * (q - l2_) * (q - l2_));
        const double dg = -g / v + 0.5 * c_ * dr / v;
        const double w1 = wv * g;
        const double w2 = wv * (g * g + dg);
        return std::exp(Complex(0.0, v)) * Complex(w1, w2 - wv);
    }

    Complex panels(double lo, double hi) const {
        constexpr double width = 2.0 * kPi;
        Complex sum = 0.0;
        for (double a = lo; a < hi; a += width) {
            const double b = std::min(hi, a + width);
            sum += numerics::gauss_legendre<16>([this](double v) { return psi(v) * w(v); }, a, b);
        }
        return sum;
    }

    // int_1^v_max psi(v) w(v) dv
    Complex psi_part() const {
        if (!fading_.is_unit()) return psi_part_general();
        const double v_cut = opt_.v_cut;
        if (!singular_end_) {
            Complex s = panels(1.0, std::min(v_max_, v_cut));
            if (v_max_ > v_cut) {
                const Complex upper = std::isfinite(v_max_) ? ibp_antiderivative(v_max_) : Complex(0.0, 0.0);
                s += upper - ibp_antiderivative(v_cut);
            }
            return s;
        }
        // u -> 0 at v_max: w has an inverse square-root singularity there and
        // the phase is stationary, so the last stretch goes to tanh-sinh.
        const double stretch = 64.0 * kPi;
        const double s_end = v_max_ - stretch;
        auto end_piece = [this](double lo) {
            return numerics::tanh_sinh([this](double v) { return psi(v) * w(v); }, lo, v_max_, opt_.rel_tol);
        };
        if (s_end <= 1.0) return end_piece(1.0);
        Complex s = panels(1.0, std::min(s_end, v_cut));
        if (s_end > v_cut) s += ibp_antiderivative(s_end) - ibp_antiderivative(v_cut);
        return s + end_piece(s_end);
    }

    Complex psi_part_general() const {
        Complex sum = 0.0;
        for (double lo = 1.0; lo < v_max_; lo *= 2.0) {
            const double hi = std::min(2.0 * lo, v_max_);
            const auto f = [this](double v) { return psi(v) * w(v); };
            const Complex piece = (singular_end_ && hi == v_max_) ? numerics::tanh_sinh(f, lo, hi, opt_.rel_tol)
                                                                  : numerics::adaptive(f, lo, hi, opt_.rel_tol);
            sum += piece;
            if (!std::isfinite(v_max_) && lo > 1e3 && std::abs(piece) < 1e-16 * std::abs(sum)) break;
            if (lo > 1e300) break;
        }
        return sum;
    }

    double a_, alpha_, c_, delta_o_, l2_;
    const FadingModel& fading_;
    CfOptions opt_;
    double v_max_ = 0.0;
    bool singular_end_ = false;
};

inline void check_omega(double omega) {
    if (!std::isfinite(omega)) throw DomainError("characteristic function: omega must be finite");
}

}  // namespace detail

// Exact PPP characteristic function, product over independent lanes.
inline Complex cf_ppp(const CfSpec& spec, double omega, const CfOptions& opt = {}) {
    detail::check_omega(omega);
    if (omega == 0.0) return {1.0, 0.0};
    if (omega < 0.0) return std::conj(cf_ppp(spec, -omega, opt));
    Complex exponent = 0.0;
    for (const auto& lane : spec.lanes) {
        if (lane.intensity == 0.0) continue;
        const detail::PppExponent j(omega * spec.gamma_p0, spec.alpha, lane.delta_o, lane.offset, spec.fading, opt);
        exponent -= lane.intensity * j();
    }
    const Complex phi = std::exp(exponent);
    if (!std::isfinite(phi.real()) || !std::isfinite(phi.imag())) {
        throw ConvergenceError("cf_ppp: exponent integral did not converge", omega);
    }
    return phi;
}

// PPP characteristic function with the lane offset neglected:
// log phi = lambda_I delta_o
//         - E_g[lambda_I (delta_o/alpha) E_{1+1/alpha}(j g a delta_o^-alpha)
//               + lambda_I Gamma(1 - 1/alpha) (-j g a)^(1/alpha)],  a = w gamma1 P0.
inline Complex cf_ppp_ln0(const CfSpec& spec, double omega) {
    detail::check_omega(omega);
    for (const auto& lane : spec.lanes) {
        if (lane.offset != 0.0) throw DomainError("cf_ppp_ln0: requires L = 0 on every lane");
    }
    if (omega == 0.0) return {1.0, 0.0};
    if (omega < 0.0) return std::conj(cf_ppp_ln0(spec, -omega));
    const double alpha = spec.alpha;
    const double a = omega * spec.gamma_p0;
    const double gamma_term = std::tgamma(1.0 - 1.0 / alpha);
    Complex exponent = 0.0;
    for (const auto& lane : spec.lanes) {
        if (lane.intensity == 0.0) continue;
        const double d0 = lane.delta_o;
        const auto bracket = [&](double g) -> Complex {
            Complex b = gamma_term * std::pow(Complex(0.0, -g * a), 1.0 / alpha);
            if (d0 > 0.0) {
                b += d0 / alpha * specfun::expint_gen(1.0 + 1.0 / alpha, Complex(0.0, g * a * std::pow(d0, -alpha)));
            }
            return b;
        };
        exponent += lane.intensity * (d0 - spec.fading.expect(bracket));
    }
    return std::exp(exponent);
}

// Worst-case (Levy) characteristic function exp(-Lambda sqrt(-j pi gamma1 P0 w)).
inline Complex cf_levy(const CfSpec& spec, double omega) {
    detail::check_omega(omega);
    if (!spec.is_worst_case()) {
        throw DomainError("cf_levy: requires the worst-case regime (delta_o = 0, L = 0, alpha = 2, unit fading)");
    }
    const Complex root = std::sqrt(Complex(0.0, -kPi * spec.gamma_p0 * omega));
    return std::exp(-spec.total_intensity() * root);
}

inline double levy_scale(const CfSpec& spec) {
    const double lam = spec.total_intensity();
    return 0.5 * kPi * lam * lam * spec.gamma_p0;
}

// F(x) = erfc(sqrt(a / (2x))), a = pi Lambda^2 gamma1 P0 / 2.
inline double levy_cdf(const CfSpec& spec, double x) {
    if (!(x > 0.0)) throw DomainError("levy_cdf: x must be > 0");
    return specfun::erfc(std::sqrt(levy_scale(spec) / (2.0 * x)));
}

inline DistributionCurve cdf_levy_closed(const CfSpec& spec, const std::vector<double>& grid) {
    if (!spec.is_worst_case()) throw DomainError("cdf_levy_closed: requires the worst-case regime");
    check_grid(grid);
    DistributionCurve c{grid, {}, CdfMethod::LevyClosedForm, 0.0};
    c.cdf.reserve(grid.size());
    for (double x : grid) c.cdf.push_back(levy_cdf(spec, x));
    return c;
}

// Quantile of the Levy law by bisection on the closed form (in log x).
inline double levy_quantile(const CfSpec& spec, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("levy_quantile: p must be in (0, 1)");
    const double a = levy_scale(spec);
    const auto f = [&](double lx) { return levy_cdf(spec, std::exp(lx)) - p; };
    double lo = std::log(a) - 10.0;
    double hi = std::log(a) + 10.0;
    while (f(lo) > 0.0) lo -= 10.0;
    while (f(hi) < 0.0) hi += 10.0;
    return std::exp(numerics::solve_bracketed(f, lo, hi, 1e-14));
}

namespace detail {

inline constexpr int kTailOrder = 10;

// Coefficients b_k of log(1 + xi (E[e^(-x g)] - 1)) = sum_k b_k x^k, k = 1..kTailOrder.
inline std::array<double, kTailOrder + 1> log_factor_series(double xi, const std::array<double, kTailOrder + 1>& moments) {
    std::array<double, kTailOrder + 1> a{};
    double fact = 1.0;
    for (int k = 1; k <= kTailOrder; ++k) {
        fact *= k;
        a[k] = xi * ((k % 2 == 0) ? 1.0 : -1.0) * moments[k] / fact;
    }
    std::array<double, kTailOrder + 1> b{};
    for (int k = 1; k <= kTailOrder; ++k) {
        double s = 0.0;
        for (int i = 1; i < k; ++i) s += i * b[i] * a[k - i];
        b[k] = a[k] - s / k;
    }
    return b;
}

inline std::array<double, kTailOrder + 1> fading_moments(const FadingModel& fading) {
    std::array<double, kTailOrder + 1> m{};
    m[0] = 1.0;
    for (int k = 1; k <= kTailOrder; ++k) {
        if (fading.is_unit()) {
            m[k] = 1.0;
            continue;
        }
        if (!fading.density) throw DomainError("laplace_bl: custom fading needs a density for its moments");
        m[k] = numerics::exp_sinh(
            [&](double g) {
                const double f = fading.density(g);
                return f == 0.0 ? 0.0 : std::pow(g, k) * f;
            },
            0.0, 1e-12);
    }
    return m;
}

// int_U^inf (L^2 + u^2)^(-k alpha/2) du for U >= 3L, binomial series in (L/u)^2
inline double power_tail_integral(int k, double alpha, double upper, double l2) {
    const double s = k * alpha;
    double sum = 0.0;
    double binom = 1.0;
    double lpow = 1.0;
    for (int j = 0; j < 400; ++j) {
        const double term = binom * lpow * std::pow(upper, 1.0 - s - 2.0 * j) / (s + 2.0 * j - 1.0);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        binom *= (-0.5 * s - j) / (j + 1.0);
        lpow *= l2;
        if (l2 == 0.0) break;
    }
    return sum;
}

inline constexpr double kSaturation = 40.0;  // Re(s) c p beyond which e^(-s c p) is below 1e-17

// Smallest distance where the integrand is not yet saturated at 1, and the
// number of half-oscillation panels needed between there and the tail.
struct PppLaplaceLayout {
    double u_lo = 0.0;
    double panels = 0.0;
};

inline PppLaplaceLayout ppp_laplace_layout(Complex s, double gp, double alpha, double delta_o, double offset) {
    const double l2 = offset * offset;
    PppLaplaceLayout out;
    out.u_lo = delta_o;
    const double q = std::pow(s.real() * gp / kSaturation, 2.0 / alpha);
    if (q > l2) out.u_lo = std::max(delta_o, std::sqrt(q - l2));
    const double p_lo = (out.u_lo == 0.0) ? std::numeric_limits<double>::infinity()
                                          : std::pow(l2 + out.u_lo * out.u_lo, -0.5 * alpha);
    out.panels = std::abs(s) * gp * p_lo / kPi;
    return out;
}

}  // namespace detail

// E[e^(-s I)] for the PPP, Re s > 0.
inline Complex laplace_ppp(const CfSpec& spec, Complex s, std::size_t max_panels = 1000000) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("laplace_ppp: s must be finite");
    if (s == Complex(0.0, 0.0)) return {1.0, 0.0};
    if (!(s.real() > 0.0)) throw DomainError("laplace_ppp: requires Re s > 0");
    const double gp = spec.gamma_p0;
    const double alpha = spec.alpha;
    const auto& fading = spec.fading;
    const auto moments = detail::fading_moments(fading);
    const auto mgf = [&](Complex z) { return fading.is_unit() ? std::exp(-z) : fading.char_fn(Complex(0.0, 1.0) * z); };
    constexpr double eta = 0.05;

    Complex exponent = 0.0;
    for (const auto& lane : spec.lanes) {
        if (lane.intensity == 0.0) continue;
        const double l2 = lane.offset * lane.offset;
        const auto path = [&](double u) { return std::pow(l2 + u * u, -0.5 * alpha); };
        const auto layout = detail::ppp_laplace_layout(s, gp, alpha, lane.delta_o, lane.offset);
        if (layout.panels > static_cast<double>(max_panels)) {
            throw ConvergenceError("laplace_ppp: transform too oscillatory for direct quadrature", std::abs(s));
        }
        // Saturated stretch: without fading e^(-s c p) is negligible there and
        // the stretch contributes its length; a random gain can still be small,
        // so the stretch is integrated.
        Complex j = layout.u_lo - lane.delta_o;
        const auto integrand = [&](double u) { return 1.0 - mgf(s * (gp * path(u))); };
        if (!fading.is_unit() && layout.u_lo > lane.delta_o) {
            j = numerics::tanh_sinh(
                [&](double u) { return u > 0.0 || l2 > 0.0 ? integrand(u) : Complex(1.0, 0.0); }, lane.delta_o,
                layout.u_lo, 1e-13);
        }
        const double scale = std::abs(s) * gp;
        const double p_tail = eta / scale;
        const double u_tail = std::max({layout.u_lo, 3.0 * lane.offset,
                                        std::sqrt(std::max(0.0, std::pow(p_tail, -2.0 / alpha) - l2))});
        // panels over which s c p(u) moves by at most pi and u at most doubles
        double u = layout.u_lo;
        const double dp = kPi / scale;
        while (u < u_tail) {
            const double p_next = path(u) - dp;
            double next = u_tail;
            if (p_next > 0.0) next = std::min(u_tail, std::sqrt(std::max(0.0, std::pow(p_next, -2.0 / alpha) - l2)));
            if (u > 0.0) next = std::min(next, 2.0 * u);
            if (!(next > u)) next = u_tail;
            j += numerics::gauss_legendre<16>(integrand, u, next);
            u = next;
        }
        // 1 - E e^(-z g) = sum_k (-1)^(k+1) m_k z^k / k!
        Complex zk = 1.0;
        double fact = 1.0;
        for (int k = 1; k <= detail::kTailOrder; ++k) {
            zk *= s * gp;
            fact *= k;
            const Complex term = ((k % 2 == 1) ? 1.0 : -1.0) * moments[k] / fact * zk *
                                 detail::power_tail_integral(k, alpha, u_tail, l2);
            j += term;
            if (std::abs(term) < 1e-17 * std::abs(j)) break;
        }
        exponent -= lane.intensity * j;
    }
    return std::exp(exponent);
}

struct PppCdfOptions {
    GilPelaezOptions gil_pelaez;
    CfOptions cf;
    int euler_terms = 18;
    // Gil-Pelaez needs about 4 x w_decay / pi uniform panels at x, where
    // |phi(w_decay)| reaches the CF floor. Points above this many panels are
    // inverted from the Laplace transform instead.
    double gil_pelaez_panel_limit = 200.0;
};

namespace detail {
// Frequency beyond which |phi| stays under the floor, by doubling.
inline double cf_decay_frequency(const CfSpec& spec, double floor, const CfOptions& opt) {
    double w = 1.0 / spec.gamma_p0;
    for (int k = 0; k < 400; ++k, w *= 2.0) {
        if (std::abs(cf_ppp(spec, w, opt)) < floor) return w;
    }
    throw ConvergenceError("cdf_ppp: characteristic function does not decay", w);
}
}  // namespace detail

// PPP interference CDF. Gil-Pelaez resolves the body and the left tail; in
// the right tail, where e^(-j w x) oscillates many times before the CF
// decays, the Euler-accelerated Bromwich inversion of the Laplace transform
// is used instead. The method of every point is recorded.
inline DistributionCurve cdf_ppp(const CfSpec& spec, const std::vector<double>& grid, const PppCdfOptions& opt = {}) {
    spec.validate();
    check_grid(grid);
    const int m = opt.euler_terms;
    const double w_decay = detail::cf_decay_frequency(spec, opt.gil_pelaez.cf_floor, opt.cf);
    std::vector<double> gp_points;
    std::vector<bool> use_euler(grid.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        use_euler[i] = x > 0.0 && 4.0 * x * w_decay / kPi > opt.gil_pelaez_panel_limit;
        if (!use_euler[i]) gp_points.push_back(x);
    }

    DistributionCurve c{grid, std::vector<double>(grid.size()), CdfMethod::GilPelaez, opt.gil_pelaez.abs_tol};
    std::vector<double> gp_values;
    if (!gp_points.empty()) {
        const auto cfo = opt.cf;
        gp_values = gil_pelaez_values([&spec, cfo](double w) { return cf_ppp(spec, w, cfo); }, gp_points,
                                      opt.gil_pelaez);
    }
    const auto transform = [&spec](Complex s) { return laplace_ppp(spec, s) / s; };
    std::vector<std::size_t> euler_index;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (use_euler[i]) euler_index.push_back(i);
    }
    numerics::parallel_for(euler_index.size(), opt.gil_pelaez.threads, [&](std::size_t k) {
        const std::size_t i = euler_index[k];
        c.cdf[i] = invert_euler(transform, grid[i], m);
    });
    std::size_t g = 0;
    c.point_methods.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        c.point_methods[i] = use_euler[i] ? CdfMethod::Euler : CdfMethod::GilPelaez;
        if (!use_euler[i]) c.cdf[i] = gp_values[g++];
    }
    if (gp_points.empty()) c.method = CdfMethod::Euler;
    monotonize(c.grid, c.cdf, c.tolerance);
    return c;
}

// ---------------------------------------------------------------- lattice LT

struct LaplaceOptions {
    int u_nodes = 33;           // 33 or 66 Gauss-Legendre nodes over the translation
    double eta = 0.05;          // sites with |s p_m| below this go to the series tail
    std::size_t max_factors = 1000000;
};

namespace detail {

// sum_{m >= 0} p(delta (a + m))^k with p(x) = (L^2 + x^2)^(-alpha/2) (gamma1 P0 factored out),
// requires delta a > L so the binomial expansion in (L/x)^2 converges.
inline double power_sum(int k, double alpha, double spacing, double a, double l2) {
    const double s = k * alpha;
    if (l2 == 0.0) return std::pow(spacing, -s) * specfun::hurwitz_zeta(s, a);
    const double ratio = l2 / (spacing * spacing);
    double sum = 0.0;
    double binom = 1.0;
    double lpow = 1.0;
    for (int j = 0; j < 400; ++j) {
        const double term = binom * lpow * specfun::hurwitz_zeta(s + 2.0 * j, a);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        binom *= (-0.5 * s - j) / (j + 1.0);
        lpow *= ratio;
    }
    return std::pow(spacing, -s) * sum;
}

// log of prod_m [(1 - xi) + xi E_g e^(-s g gp p_m(u))] for one lane at one translation u
inline Complex lattice_log_product(Complex s, double u, const LaneTerm& lane, double gp, double alpha,
                                   const FadingModel& fading, const std::array<double, kTailOrder + 1>& series,
                                   const LaplaceOptions& opt) {
    const double xi = lane.duty_cycle;
    const double l2 = lane.offset * lane.offset;
    const double mag = std::abs(s) * gp;
    // direct sites until |s| gp p(x) < eta and x > 3L
    const double x_eta = std::max(std::pow(mag / opt.eta, 1.0 / alpha), 3.0 * lane.offset);
    const double m_end = std::ceil((x_eta - lane.delta_o) / lane.spacing - u);
    if (m_end > static_cast<double>(opt.max_factors)) {
        throw ConvergenceError("laplace_bl: product needs more than the allowed number of factors", std::abs(s));
    }
    const auto sites = static_cast<std::size_t>(std::max(m_end, 0.0));
    Complex log_sum = 0.0;
    Complex block = 1.0;
    for (std::size_t m = 0; m < sites; ++m) {
        const double x = lane.delta_o + (static_cast<double>(m) + u) * lane.spacing;
        const double d2 = x * x + l2;
        const double p = alpha == 2.0 ? 1.0 / d2 : std::pow(d2, -0.5 * alpha);
        const Complex arg = s * (gp * p);
        const Complex lt = fading.is_unit() ? std::exp(-arg) : fading.char_fn(Complex(0.0, 1.0) * arg);
        block *= (1.0 - xi) + xi * lt;
        if ((m & 31u) == 31u) {
            log_sum += std::log(block);
            block = 1.0;
        }
    }
    log_sum += std::log(block);

    // series tail over m >= sites
    const double a = (lane.delta_o / lane.spacing) + u + static_cast<double>(sites);
    if (a <= 0.0) return log_sum;
    Complex spow = 1.0;
    for (int k = 1; k <= kTailOrder; ++k) {
        spow *= s * gp;
        const double sk = power_sum(k, alpha, lane.spacing, a, l2);
        const Complex term = series[k] * spow * sk;
        log_sum += term;
        if (k > 2 && std::abs(term) < 1e-18) break;
    }
    return log_sum;
}

template <int N>
Complex lattice_lane_transform(Complex s, const LaneTerm& lane, double gp, double alpha, const FadingModel& fading,
                               const std::array<double, kTailOrder + 1>& series, const LaplaceOptions& opt) {
    static const auto nodes = numerics::gauss_legendre_unit_nodes<N>();
    Complex sum = 0.0;
    for (const auto& [u, wt] : nodes) {
        sum += wt * std::exp(lattice_log_product(s, u, lane, gp, alpha, fading, series, opt));
    }
    return sum;
}

}  // namespace detail

// E[e^(-s I)] for the Bernoulli lattice. Lanes are independent, each with its
// own translation. Defined for every complex s when fading is bounded;
// with unbounded fading the transform must exist at s.
inline Complex laplace_bl(const CfSpec& spec, Complex s, const LaplaceOptions& opt = {}) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("laplace_bl: s must be finite");
    if (opt.u_nodes != 33 && opt.u_nodes != 66) throw DomainError("laplace_bl: u_nodes must be 33 or 66");
    if (s == Complex(0.0, 0.0)) return {1.0, 0.0};
    const auto moments = detail::fading_moments(spec.fading);
    Complex result = 1.0;
    for (const auto& lane : spec.lanes) {
        if (lane.duty_cycle == 0.0) continue;
        const auto series = detail::log_factor_series(lane.duty_cycle, moments);
        result *= opt.u_nodes == 33
                      ? detail::lattice_lane_transform<33>(s, lane, spec.gamma_p0, spec.alpha, spec.fading, series, opt)
                      : detail::lattice_lane_transform<66>(s, lane, spec.gamma_p0, spec.alpha, spec.fading, series, opt);
    }
    return result;
}

struct LatticeCdfOptions {
    int talbot_nodes = 32;
    int euler_terms = 18;
    double tolerance = 1e-6;
    unsigned threads = 1;
    LaplaceOptions laplace;
};

// F(x) = L^-1[L_s{I} / s](x). Unbounded fading uses the fixed Talbot contour;
// bounded fading (the transform grows without bound as Re s -> -inf) uses
// the Euler-accelerated Bromwich series, which stays in Re s > 0.
inline DistributionCurve cdf_bl_talbot(const CfSpec& spec, const std::vector<double>& grid,
                                       const LatticeCdfOptions& opt = {}) {
    spec.validate();
    check_grid(grid);
    if (!(grid.front() > 0.0)) throw DomainError("cdf_bl_talbot: grid must be > 0");
    const bool talbot = !spec.fading.bounded;
    DistributionCurve c{grid, std::vector<double>(grid.size()), talbot ? CdfMethod::Talbot : CdfMethod::Euler,
                        opt.tolerance};
    const auto transform = [&](Complex s) { return laplace_bl(spec, s, opt.laplace) / s; };
    numerics::parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
        c.cdf[i] = talbot ? invert_talbot(transform, grid[i], opt.talbot_nodes)
                          : invert_euler(transform, grid[i], opt.euler_terms);
    });
    monotonize(c.grid, c.cdf, opt.tolerance);
    return c;
}

}  // namespace radarsg::interference
