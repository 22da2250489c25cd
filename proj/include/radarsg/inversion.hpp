#pragma once

// Numerical inversion of characteristic functions (Gil-Pelaez) and of Laplace
// transforms (fixed Talbot contour, Euler-accelerated Bromwich series), plus
// the tabulated-CDF container the rest of the library passes around.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "radarsg/errors.hpp"
#include "radarsg/numerics.hpp"

namespace radarsg {

enum class CdfMethod { GilPelaez, Talbot, Euler, LevyClosedForm, Empirical };

inline const char* to_string(CdfMethod m) {
    switch (m) {
        case CdfMethod::GilPelaez: return "gil_pelaez";
        case CdfMethod::Talbot: return "talbot";
        case CdfMethod::Euler: return "euler";
        case CdfMethod::LevyClosedForm: return "levy_closed_form";
        case CdfMethod::Empirical: return "empirical";
    }
    return "unknown";
}

// Tabulated CDF of the interference power. Analytic curves are interpolated
// linearly inside the grid; empirical curves are right-continuous steps over
// the sorted samples and are defined everywhere.
struct DistributionCurve {
    std::vector<double> grid;  // watts, strictly increasing
    std::vector<double> cdf;
    CdfMethod method = CdfMethod::GilPelaez;
    double tolerance = 0.0;
    // Per-point method when a curve mixes inversions; empty means `method` throughout.
    std::vector<CdfMethod> point_methods = {};

    std::size_t size() const { return grid.size(); }

    CdfMethod method_at(std::size_t i) const { return point_methods.empty() ? method : point_methods.at(i); }

    double operator()(double x) const {
        if (grid.empty()) throw DomainError("DistributionCurve: empty curve");
        if (method == CdfMethod::Empirical) {
            const auto it = std::upper_bound(grid.begin(), grid.end(), x);
            if (it == grid.begin()) return 0.0;
            return cdf[static_cast<std::size_t>(it - grid.begin()) - 1];
        }
        if (x < grid.front() || x > grid.back()) {
            throw DomainError("DistributionCurve: x outside tabulated range");
        }
        const auto it = std::lower_bound(grid.begin(), grid.end(), x);
        const auto i = static_cast<std::size_t>(it - grid.begin());
        if (grid[i] == x || i == 0) return cdf[i];
        const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
    }

    // Smallest tabulated-interpolated x with F(x) >= p, found by bisection.
    double quantile(double p) const {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must be in [0, 1]");
        if (grid.empty()) throw DomainError("DistributionCurve: empty curve");
        if (p <= cdf.front()) return grid.front();
        if (p > cdf.back()) throw DomainError("quantile: p beyond tabulated range");
        if (method == CdfMethod::Empirical) {
            const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
            return grid[static_cast<std::size_t>(it - cdf.begin())];
        }
        double lo = grid.front();
        double hi = grid.back();
        for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            if ((*this)(mid) >= p) hi = mid; else lo = mid;
        }
        return hi;
    }
};

inline void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("grid must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw DomainError("grid values must be finite");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
    }
}

// Enforces a nondecreasing CDF in place. Decreases up to 10 * tol are treated
// as quadrature noise and flattened; anything larger is reported. Values are
// then clamped to [0, 1].
inline void monotonize(const std::vector<double>& grid, std::vector<double>& cdf, double tol) {
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        if (cdf[i] < running) {
            if (running - cdf[i] > 10.0 * tol) {
                throw ConvergenceError("CDF decreases by more than the quadrature tolerance", grid[i]);
            }
            cdf[i] = running;
        }
        running = cdf[i];
    }
    for (double& v : cdf) v = std::clamp(v, 0.0, 1.0);
}

struct GilPelaezOptions {
    double abs_tol = 1e-5;        // target absolute CDF error per point
    double head_factor = 1e-6;    // head interval [0, w0], w0 ~ head_factor / |x|
    double cf_floor = 1e-8;       // |phi| below this ends the integration
    std::size_t max_panels = 4000000;
    unsigned threads = 1;
};

namespace detail {

// Gil-Pelaez integral I(x) = int_0^inf Im[phi(w) e^(-jwx)] / w dw evaluated
// on panels whose edges are powers of two (or multiples of a power-of-two
// width), so that x values with the same panel width reuse every node.
class GilPelaezEngine {
public:
    GilPelaezEngine(std::function<Complex(double)> cf, const GilPelaezOptions& opt)
        : cf_(std::move(cf)), opt_(opt), unit_(numerics::gauss_legendre_unit_nodes<16>()) {}

    std::vector<double> run(const std::vector<double>& grid) {
        std::vector<double> out(grid.size());
        double x_ref = std::numeric_limits<double>::infinity();
        for (double x : grid) {
            if (x != 0.0) x_ref = std::min(x_ref, std::abs(x));
        }
        if (!std::isfinite(x_ref)) x_ref = 1.0;

        // group by uniform-panel width exponent
        std::unordered_map<int, std::vector<std::size_t>> groups;
        std::vector<int> order;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] == 0.0) {
                out[i] = 0.5 - integral_at_zero(x_ref) / kPi;
                continue;
            }
            const int e = static_cast<int>(std::floor(std::log2(kPi / (4.0 * std::abs(grid[i])))));
            if (!groups.count(e)) order.push_back(e);
            groups[e].push_back(i);
        }
        std::sort(order.begin(), order.end());
        for (int e : order) integrate_group(grid, groups[e], e, out);
        return out;
    }

private:
    struct Active {
        std::size_t index;
        double x;
        double sum;
        Complex phi_prev;
        bool done = false;
    };

    void ensure(const std::vector<double>& nodes) {
        std::vector<double> missing;
        for (double w : nodes) {
            if (!cache_.count(w)) missing.push_back(w);
        }
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        std::vector<Complex> values(missing.size());
        numerics::parallel_for(missing.size(), opt_.threads, [&](std::size_t i) { values[i] = cf_(missing[i]); });
        for (std::size_t i = 0; i < missing.size(); ++i) {
            if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
                throw ConvergenceError("characteristic function is not finite", missing[i]);
            }
            cache_.emplace(missing[i], values[i]);
        }
    }

    Complex phi(double w) const { return cache_.at(w); }

    static double integrand(Complex phi_w, double w, double x) {
        return (phi_w * std::exp(Complex(0.0, -w * x))).imag() / w;
    }

    void panel_nodes(double a, double width, std::vector<double>& nodes) const {
        for (const auto& [t, wt] : unit_) nodes.push_back(a + width * t);
        nodes.push_back(a + width);
    }

    double panel(double a, double width, double x) const {
        double s = 0.0;
        for (const auto& [t, wt] : unit_) {
            const double w = a + width * t;
            s += wt * integrand(phi(w), w, x);
        }
        return s * width;
    }

    // int_0^w0 h(w) dw assuming h(w) ~ c w^p on the head.
    static double head(double h_full, double h_half, double w0) {
        double p = 0.0;
        if (h_full != 0.0 && h_half != 0.0 && (h_full > 0.0) == (h_half > 0.0)) {
            p = std::clamp(std::log2(h_full / h_half), -0.95, 3.0);
        }
        return h_full * w0 / (1.0 + p);
    }

    bool converged(Active& a, double omega, double width) const {
        const Complex p = phi(omega);
        const double target = 0.01 * opt_.abs_tol * kPi;
        const double ax = std::abs(a.x);
        const double mag = std::abs(p);
        const double dphi = std::abs(p - a.phi_prev) / width;
        a.phi_prev = p;
        const double ibp_bound = (dphi / omega + 2.0 * mag / (omega * omega)) / (ax * ax);
        const bool small_cf = mag < opt_.cf_floor && mag / (omega * ax) < target;
        if (ibp_bound < target || small_cf) {
            // first-order integration-by-parts tail
            a.sum += (p * std::exp(Complex(0.0, -omega * a.x)) / Complex(0.0, a.x * omega)).imag();
            a.done = true;
        }
        return a.done;
    }

    void integrate_group(const std::vector<double>& grid, const std::vector<std::size_t>& members, int e,
                         std::vector<double>& out) {
        const double width = std::ldexp(1.0, e);
        std::vector<Active> act;
        int kmin = e;
        for (std::size_t i : members) {
            const double x = grid[i];
            const int h0 = std::min(e - 1, static_cast<int>(std::floor(std::log2(opt_.head_factor / std::abs(x)))));
            kmin = std::min(kmin, h0);
            act.push_back({i, x, 0.0, Complex(1.0, 0.0)});
        }

        // geometric panels [2^k, 2^(k+1)] for k < e, plus the head sample points
        std::vector<double> nodes;
        for (int k = kmin - 1; k < e; ++k) {
            nodes.push_back(std::ldexp(1.0, k));
            if (k >= kmin) panel_nodes(std::ldexp(1.0, k), std::ldexp(1.0, k), nodes);
        }
        ensure(nodes);
        for (auto& a : act) {
            const int h0 = std::min(e - 1, static_cast<int>(std::floor(std::log2(opt_.head_factor / std::abs(a.x)))));
            const double w0 = std::ldexp(1.0, h0);
            a.sum = head(integrand(phi(w0), w0, a.x), integrand(phi(0.5 * w0), 0.5 * w0, a.x), w0);
            a.phi_prev = phi(w0);
            for (int k = h0; k < e && !a.done; ++k) {
                const double lo = std::ldexp(1.0, k);
                a.sum += panel(lo, lo, a.x);
                converged(a, 2.0 * lo, lo);
            }
        }

        // uniform panels [m w, (m+1) w], m >= 1, marched in growing blocks
        std::size_t m = 1;
        std::size_t block = 32;
        while (true) {
            bool any = false;
            for (const auto& a : act) any = any || !a.done;
            if (!any) break;
            if (m > opt_.max_panels) {
                throw ConvergenceError("Gil-Pelaez truncation criterion not met within the panel budget",
                                       static_cast<double>(m) * width);
            }
            nodes.clear();
            for (std::size_t j = m; j < m + block; ++j) panel_nodes(static_cast<double>(j) * width, width, nodes);
            ensure(nodes);
            for (auto& a : act) {
                for (std::size_t j = m; j < m + block && !a.done; ++j) {
                    const double lo = static_cast<double>(j) * width;
                    a.sum += panel(lo, width, a.x);
                    converged(a, lo + width, width);
                }
            }
            m += block;
            block = std::min<std::size_t>(block * 2, 8192);
        }
        for (const auto& a : act) out[a.index] = 0.5 - a.sum / kPi;
    }

    // x = 0: int_0^inf Im[phi(w)] / w dw, no oscillation; geometric panels only
    // with power-law fits at both ends.
    double integral_at_zero(double x_ref) {
        const int h0 = static_cast<int>(std::floor(std::log2(opt_.head_factor / x_ref)));
        std::vector<double> nodes{std::ldexp(1.0, h0 - 1), std::ldexp(1.0, h0)};
        panel_nodes(std::ldexp(1.0, h0), std::ldexp(1.0, h0), nodes);
        ensure(nodes);
        auto h = [&](double w) { return phi(w).imag() / w; };
        const double w0 = std::ldexp(1.0, h0);
        double sum = head(h(w0), h(0.5 * w0), w0);
        const double target = 0.01 * opt_.abs_tol * kPi;
        for (int k = h0; k < h0 + 400; ++k) {
            const double lo = std::ldexp(1.0, k);
            nodes.clear();
            panel_nodes(lo, lo, nodes);
            ensure(nodes);
            sum += panel(lo, lo, 0.0);
            const double hi = 2.0 * lo;
            const double tail_scale = std::abs(h(hi)) * hi;
            if (tail_scale < target) {
                const double h1 = h(hi);
                const double h2 = h(lo);
                if (h1 != 0.0 && h2 != 0.0 && (h1 > 0.0) == (h2 > 0.0)) {
                    const double p = std::log2(h1 / h2);
                    if (p < -1.0) sum += -h1 * hi / (1.0 + p);
                }
                return sum;
            }
        }
        throw ConvergenceError("Gil-Pelaez integral at x = 0 did not settle", std::ldexp(1.0, h0 + 400));
    }

    std::function<Complex(double)> cf_;
    GilPelaezOptions opt_;
    std::vector<std::pair<double, double>> unit_;
    std::unordered_map<double, Complex> cache_;
};

}  // namespace detail

// Raw Gil-Pelaez values F(x) = 1/2 - (1/pi) int_0^inf Im[phi(w) e^(-jwx)]/w dw,
// before monotonization and clamping.
inline std::vector<double> gil_pelaez_values(std::function<Complex(double)> cf, const std::vector<double>& grid,
                                             const GilPelaezOptions& opt = {}) {
    check_grid(grid);
    const Complex at_zero = cf(0.0);
    if (std::abs(at_zero - Complex(1.0, 0.0)) > 1e-12) {
        throw DomainError("cdf_gil_pelaez: characteristic function must equal 1 at 0");
    }
    detail::GilPelaezEngine engine(std::move(cf), opt);
    return engine.run(grid);
}

inline DistributionCurve cdf_gil_pelaez(std::function<Complex(double)> cf, const std::vector<double>& grid,
                                        const GilPelaezOptions& opt = {}) {
    DistributionCurve c{grid, gil_pelaez_values(std::move(cf), grid, opt), CdfMethod::GilPelaez, opt.abs_tol};
    monotonize(c.grid, c.cdf, c.tolerance);
    return c;
}

// Fixed Talbot contour: S(theta) = r theta (cot theta + j), r = 2M/(5t).
// Double precision limits useful M to about 32 (the e^(rt) = e^(0.4M)
// prefactor amplifies rounding); F must decay as Re s -> -inf.
template <class F>
double invert_talbot(F&& transform, double t, int m = 32) {
    if (!(t > 0.0)) throw DomainError("invert_talbot: t must be > 0");
    if (m < 2) throw DomainError("invert_talbot: need at least 2 nodes");
    const double r = 2.0 * m / (5.0 * t);
    const Complex f0 = transform(Complex(r, 0.0));
    if (!std::isfinite(f0.real())) throw ConvergenceError("Talbot contour evaluation failed at node 0", t);
    double sum = 0.5 * (f0 * std::exp(r * t)).real();
    for (int k = 1; k < m; ++k) {
        const double theta = k * kPi / m;
        const double cot = 1.0 / std::tan(theta);
        const Complex s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const Complex fs = transform(s);
        const Complex term = std::exp(t * s) * fs * Complex(1.0, sigma);
        if (!std::isfinite(term.real())) {
            throw ConvergenceError("Talbot contour evaluation failed at node " + std::to_string(k), t);
        }
        sum += term.real();
    }
    return r / m * sum;
}

// Euler-accelerated Bromwich (Fourier series) inversion. Nodes stay in
// Re s = A/t > 0, so only the transform's defining half-plane is used.
template <class F>
double invert_euler(F&& transform, double t, int m = 18) {
    if (!(t > 0.0)) throw DomainError("invert_euler: t must be > 0");
    if (m < 1) throw DomainError("invert_euler: need m >= 1");
    const double a = m * std::log(10.0) / 3.0;
    std::vector<double> eta(2 * m + 1, 1.0);
    eta[0] = 0.5;
    eta[2 * m] = std::ldexp(1.0, -m);
    double binom = 1.0;
    for (int k = 1; k < m; ++k) {
        binom *= static_cast<double>(m - k + 1) / k;
        eta[2 * m - k] = eta[2 * m - k + 1] + std::ldexp(binom, -m);
    }
    const double scale = std::pow(10.0, m / 3.0) / t;
    double sum = 0.0;
    for (int k = 0; k <= 2 * m; ++k) {
        const Complex s(a / t, kPi * k / t);
        const Complex fs = transform(s);
        if (!std::isfinite(fs.real())) {
            throw ConvergenceError("Euler inversion evaluation failed at node " + std::to_string(k), t);
        }
        sum += (k % 2 == 0 ? 1.0 : -1.0) * eta[k] * fs.real();
    }
    return scale * sum;
}

}  // namespace radarsg
