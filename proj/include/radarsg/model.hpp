#pragma once

// Scenario description and the constants derived from it. Everything in here
// is SI and linear; decibel quantities only exist at the I/O boundary.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "radarsg/errors.hpp"
#include "radarsg/numerics.hpp"
#include "radarsg/rng.hpp"
#include "radarsg/z0.hpp"

namespace radarsg {

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double p_w) { return 10.0 * std::log10(p_w) + 30.0; }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct RadarParams {
    double tx_power = 0.01;                   // P0 [W]
    double antenna_gain = 31622.776601683792;  // G_t, linear
    double beamwidth = deg_to_rad(15.0);      // theta [rad]
    double frequency = 76.5e9;                // f [Hz]
    double rcs = 1000.0;                      // sigma_c [m^2]
    double sinr_threshold = 10.0;             // T, linear
    double pathloss_exp = 2.0;                // alpha
    double noise_power = 0.0;                 // N [W]

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(std::isfinite(v) && v > 0.0)) throw InvariantError(name, "must be finite and > 0");
        };
        positive(tx_power, "tx_power");
        positive(antenna_gain, "antenna_gain");
        positive(frequency, "frequency");
        positive(rcs, "rcs");
        positive(sinr_threshold, "sinr_threshold");
        if (!(beamwidth > 0.0 && beamwidth <= kPi)) throw InvariantError("beamwidth", "must be in (0, pi]");
        if (!(std::isfinite(pathloss_exp) && pathloss_exp > 1.0)) {
            throw InvariantError("pathloss_exp", "must be > 1");
        }
        if (!(std::isfinite(noise_power) && noise_power >= 0.0)) {
            throw InvariantError("noise_power", "must be >= 0");
        }
    }
};

struct Lane {
    double offset = 10.0;   // L_n [m]
    double density = 0.1;   // lambda [1/m]

    void validate() const {
        if (!(std::isfinite(offset) && offset >= 0.0)) throw InvariantError("offset", "must be >= 0");
        if (!(std::isfinite(density) && density > 0.0)) throw InvariantError("density", "must be > 0");
    }
};

struct MediumAccess {
    double duty_cycle = 0.1;  // xi

    void validate() const {
        if (!(duty_cycle >= 0.0 && duty_cycle <= 1.0)) throw InvariantError("duty_cycle", "must be in [0, 1]");
    }
};

enum class FadingKind { UnitDeterministic, Custom };

// Per-interferer power gain g. Custom models provide a sampler for Monte
// Carlo and either a closed-form transform E[exp(j t g)] (complex t) or a
// density on [0, inf) from which expectations are computed by quadrature.
struct FadingModel {
    FadingKind kind = FadingKind::UnitDeterministic;
    std::string name = "unit";
    double mean = 1.0;
    bool bounded = true;  // support of g is bounded
    std::function<double(CounterRng&)> sampler;
    std::function<Complex(Complex)> transform;
    std::function<double(double)> density;

    static FadingModel unit() { return {}; }

    // Exponentially distributed power gain (Rayleigh amplitude), mean 1.
    static FadingModel rayleigh() {
        FadingModel m;
        m.kind = FadingKind::Custom;
        m.name = "rayleigh";
        m.bounded = false;
        m.sampler = [](CounterRng& rng) { return rng.exponential(1.0); };
        m.transform = [](Complex t) { return 1.0 / (1.0 - Complex(0.0, 1.0) * t); };
        m.density = [](double g) { return std::exp(-g); };
        return m;
    }

    bool is_unit() const { return kind == FadingKind::UnitDeterministic; }

    double draw(CounterRng& rng) const { return is_unit() ? 1.0 : sampler(rng); }

    // E_g[h(g)]
    template <class H>
    auto expect(H&& h) const {
        if (is_unit()) return h(1.0);
        if (!density) throw DomainError("fading model '" + name + "' has no density for expectations");
        return numerics::exp_sinh([&](double g) { return h(g) * density(g); }, 0.0, 1e-11);
    }

    // E_g[exp(j t g)] for complex t with Im t >= 0.
    Complex char_fn(Complex t) const {
        const Complex j(0.0, 1.0);
        if (is_unit()) return std::exp(j * t);
        if (transform) return transform(t);
        return expect([&](double g) { return std::exp(j * t * g); });
    }

    void validate() const {
        if (is_unit()) return;
        if (!sampler) throw InvariantError("fading", "custom model needs a sampler");
        if (!transform && !density) throw InvariantError("fading", "custom model needs a transform or a density");
        if (std::abs(mean - 1.0) > 1e-9) throw InvariantError("fading", "mean channel gain must be 1");
        if (density) {
            const double m = numerics::exp_sinh([&](double g) { return g * density(g); }, 0.0, 1e-10);
            if (std::abs(m - 1.0) > 1e-6) throw InvariantError("fading", "density mean must be 1");
        }
    }
};

enum class Geometry { PPP, BernoulliLattice };

inline const char* to_string(Geometry g) {
    return g == Geometry::PPP ? "ppp" : "bernoulli_lattice";
}

struct Scenario {
    RadarParams radar;
    std::vector<Lane> lanes{Lane{}};
    MediumAccess access;
    FadingModel fading;
    Geometry geometry = Geometry::PPP;
    // Keep the guard distance delta_o implied by the lane offset but measure
    // interferer distance along the road only (the L_n -> 0 approximation).
    bool neglect_offset_in_distance = false;

    void validate() const {
        radar.validate();
        if (lanes.empty()) throw InvariantError("lanes", "at least one lane is required");
        for (std::size_t i = 0; i < lanes.size(); ++i) {
            try {
                lanes[i].validate();
            } catch (const InvariantError& e) {
                throw InvariantError("lanes[" + std::to_string(i) + "]." + e.field(), e.what());
            }
        }
        access.validate();
        fading.validate();
    }

    // Lattice spacing delta = 1 / lambda.
    double lattice_spacing(std::size_t lane_index) const { return 1.0 / lanes.at(lane_index).density; }
};

// Minimum longitudinal distance of an interferer inside the antenna cone.
inline double guard_distance(double lane_offset, double beamwidth) {
    if (lane_offset == 0.0 || beamwidth >= kPi) return 0.0;
    return lane_offset / std::tan(0.5 * beamwidth);
}

struct DerivedConstants {
    RadarParams radar;
    double gamma1 = 0.0;    // G_t^2 (c / 4 pi f)^2 [m^2]
    double gamma2 = 0.0;    // sigma_c / 4 pi [m^2]
    double delta_o = 0.0;   // guard distance [m]
    double offset = 0.0;    // lane offset used in the interferer distance [m]
    double c_coeff = 0.0;   // sqrt(pi T / (4 gamma2)) [1/m]
    double big_k = 0.0;     // z0 sqrt(4 gamma2 / (pi T)) [m]
    double z_o = 0.0;

    // C = sqrt(pi T / 4 gamma2) R^2
    double big_c(double range) const { return c_coeff * range * range; }
};

inline DerivedConstants derive(const Scenario& scenario, std::size_t lane_index) {
    if (lane_index >= scenario.lanes.size()) throw DomainError("derive: lane index out of range");
    const auto& r = scenario.radar;
    const auto& lane = scenario.lanes[lane_index];
    DerivedConstants d;
    d.radar = r;
    const double wavelength_term = kSpeedOfLight / (4.0 * kPi * r.frequency);
    d.gamma1 = r.antenna_gain * r.antenna_gain * wavelength_term * wavelength_term;
    d.gamma2 = r.rcs / (4.0 * kPi);
    d.delta_o = guard_distance(lane.offset, r.beamwidth);
    d.offset = scenario.neglect_offset_in_distance ? 0.0 : lane.offset;
    d.c_coeff = std::sqrt(kPi * r.sinr_threshold / (4.0 * d.gamma2));
    d.z_o = performance::z0();
    d.big_k = d.z_o / d.c_coeff;
    return d;
}

}  // namespace radarsg
