#pragma once

// Replicated simulation: interference samples at the origin, empirical
// ranging success, and the lattice-to-Poisson convergence experiment.
// Replicate r always draws from the stream keyed by (master_seed, r), so
// results do not depend on how replicates are spread over threads.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "radarsg/errors.hpp"
#include "radarsg/geometry.hpp"
#include "radarsg/interference.hpp"
#include "radarsg/inversion.hpp"
#include "radarsg/model.hpp"
#include "radarsg/numerics.hpp"
#include "radarsg/performance.hpp"
#include "radarsg/rng.hpp"

namespace radarsg::montecarlo {

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

struct McConfig {
    std::size_t replicates = 5000;
    double window = 10000.0;  // one-sided observation window (delta_o, W] [m]
    std::uint64_t master_seed = 20240101;
    unsigned threads = 0;     // 0 = hardware concurrency

    void validate() const {
        if (replicates < 100) throw InvariantError("replicates", "must be >= 100");
        if (!(std::isfinite(window) && window > 0.0)) throw InvariantError("window", "must be > 0");
    }
};

struct McEstimate {
    double value = 0.0;
    double ci_halfwidth = 0.0;  // 99%
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
};

struct InterferenceSamples {
    std::vector<double> samples;  // one per replicate, in replicate order [W]
    DistributionCurve empirical_cdf;
    McEstimate mean;
    // The mean diverges when a lane has delta_o = 0 and no offset; it is then
    // reported as NaN with this flag set.
    bool mean_suppressed = false;
    std::string warning;
};

// Right-continuous empirical CDF over the distinct sample values.
inline DistributionCurve empirical_cdf(std::vector<double> samples) {
    if (samples.empty()) throw DomainError("empirical_cdf: no samples");
    std::sort(samples.begin(), samples.end());
    DistributionCurve c{{}, {}, CdfMethod::Empirical, 0.0};
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
        c.grid.push_back(samples[i]);
        c.cdf.push_back(static_cast<double>(i + 1) / n);
    }
    return c;
}

// Aggregate interference at the origin for one replicate. Lanes are drawn in
// order; for each lane the positions come first, then one gain per point.
inline double simulate_interference(const Scenario& scenario, const std::vector<DerivedConstants>& consts,
                                    double window, CounterRng& rng) {
    double total = 0.0;
    std::vector<double> gains;
    for (std::size_t l = 0; l < scenario.lanes.size(); ++l) {
        const auto pattern = geometry::sample(scenario.geometry, scenario.lanes[l], scenario.access,
                                              consts[l].delta_o, window, rng, l);
        if (scenario.fading.is_unit()) {
            total += interference::aggregate_interference(pattern, consts[l]);
            continue;
        }
        gains.resize(pattern.size());
        for (auto& g : gains) g = scenario.fading.draw(rng);
        total += interference::aggregate_interference(pattern, consts[l], gains);
    }
    return total;
}

namespace detail {
inline std::vector<DerivedConstants> derive_all(const Scenario& scenario, double window) {
    std::vector<DerivedConstants> out;
    for (std::size_t l = 0; l < scenario.lanes.size(); ++l) {
        out.push_back(derive(scenario, l));
        if (!(window > out.back().delta_o)) {
            throw InvariantError("window", "must exceed delta_o of lane " + std::to_string(l));
        }
    }
    return out;
}

inline McEstimate mean_estimate(const std::vector<double>& samples, std::uint64_t seed) {
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= n;
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= (n - 1.0);
    return {mean, kZ99 * std::sqrt(var / n), samples.size(), seed};
}
}  // namespace detail

inline std::vector<double> interference_samples(const Scenario& scenario, const McConfig& mc) {
    scenario.validate();
    mc.validate();
    const auto consts = detail::derive_all(scenario, mc.window);
    std::vector<double> samples(mc.replicates);
    numerics::parallel_for(mc.replicates, mc.threads, [&](std::size_t r) {
        CounterRng rng(mc.master_seed, r);
        samples[r] = simulate_interference(scenario, consts, mc.window, rng);
    });
    return samples;
}

inline InterferenceSamples mc_interference(const Scenario& scenario, const McConfig& mc) {
    InterferenceSamples out;
    out.samples = interference_samples(scenario, mc);
    out.empirical_cdf = empirical_cdf(out.samples);
    out.mean = detail::mean_estimate(out.samples, mc.master_seed);
    for (std::size_t l = 0; l < scenario.lanes.size(); ++l) {
        const auto c = derive(scenario, l);
        if (c.delta_o == 0.0 && c.offset == 0.0 && scenario.access.duty_cycle > 0.0) out.mean_suppressed = true;
    }
    if (out.mean_suppressed) {
        out.mean.value = std::numeric_limits<double>::quiet_NaN();
        out.mean.ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
        out.warning = "mean interference diverges with delta_o = 0 and no lane offset; sample mean suppressed";
    }
    return out;
}

// Raw samples as little-endian IEEE-754 doubles.
inline void write_samples_binary(const std::string& path, const std::vector<double>& samples) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("write_samples_binary: cannot open " + path);
    for (double v : samples) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        char bytes[8];
        std::memcpy(bytes, &bits, 8);
        f.write(bytes, 8);
    }
    if (!f) throw DomainError("write_samples_binary: write failed for " + path);
}

// Clopper-Pearson interval at 99%.
inline std::pair<double, double> binomial_ci99(std::size_t successes, std::size_t trials) {
    using boost::math::binomial_distribution;
    const double n = static_cast<double>(trials);
    const double k = static_cast<double>(successes);
    return {binomial_distribution<>::find_lower_bound_on_p(n, k, 0.005),
            binomial_distribution<>::find_upper_bound_on_p(n, k, 0.005)};
}

// Fraction of replicates with SINR >= T at each range, from a fixed set of
// interference samples; the signal is deterministic in R, so the same samples
// serve the whole grid.
inline performance::PerformanceCurve ranging_success_from_samples(std::vector<double> samples,
                                                                  const DerivedConstants& consts,
                                                                  const std::vector<double>& ranges) {
    if (samples.empty()) throw DomainError("ranging_success: no samples");
    std::sort(samples.begin(), samples.end());
    performance::PerformanceCurve c{ranges, {}, performance::CurveKind::PsVsRange, {}, {}};
    const double noise = consts.radar.noise_power;
    for (double r : ranges) {
        if (!(r > 0.0)) throw DomainError("ranging_success: ranges must be > 0");
        // SINR >= T  <=>  T (I + N) <= S
        const double s = performance::ranging_signal(consts, r);
        const double t = consts.radar.sinr_threshold;
        const auto ok = static_cast<std::size_t>(
            std::partition_point(samples.begin(), samples.end(), [&](double i) { return t * (i + noise) <= s; }) -
            samples.begin());
        c.values.push_back(static_cast<double>(ok) / static_cast<double>(samples.size()));
        const auto ci = binomial_ci99(ok, samples.size());
        c.ci_lower.push_back(ci.first);
        c.ci_upper.push_back(ci.second);
    }
    c.validate();
    return c;
}

inline performance::PerformanceCurve mc_ranging_success(const Scenario& scenario, const std::vector<double>& ranges,
                                                        const McConfig& mc) {
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        if (!(ranges[i] > ranges[i - 1])) throw DomainError("mc_ranging_success: ranges must increase");
    }
    return ranging_success_from_samples(interference_samples(scenario, mc), derive(scenario, 0), ranges);
}

// ------------------------------------------------------------ convergence

struct GofResult {
    double chi_square = 0.0;
    double dof = 0.0;
    double p_value = 0.0;
    double tv_distance = 0.0;
};

struct ConvergenceRow {
    double delta = 0.0;       // lattice spacing [m]
    double duty_cycle = 0.0;  // xi = delta lambda_I
    GofResult gof;
};

// Pearson test of pooled interval counts against the Poisson mixture implied
// by the interval lengths. Adjacent bins are merged until each expects at
// least 5; the upper tail beyond the largest count joins the last bin.
inline GofResult poisson_gof(const std::vector<std::size_t>& pooled_counts, const std::vector<double>& means) {
    if (pooled_counts.empty() || means.empty()) throw DomainError("poisson_gof: no data");
    const std::size_t kmax = *std::max_element(pooled_counts.begin(), pooled_counts.end());
    const double n = static_cast<double>(pooled_counts.size());
    const double per_mean = n / static_cast<double>(means.size());
    std::vector<double> obs(kmax + 1, 0.0);
    for (auto c : pooled_counts) obs[c] += 1.0;

    std::vector<boost::math::poisson_distribution<double>> dists;
    for (double mu : means) dists.emplace_back(mu);
    const auto expected = [&](std::size_t k) {
        double e = 0.0;
        for (const auto& d : dists) e += boost::math::pdf(d, static_cast<double>(k));
        return e * per_mean;
    };
    const auto tail_above = [&](std::size_t k) {
        double e = 0.0;
        for (const auto& d : dists) e += boost::math::cdf(boost::math::complement(d, static_cast<double>(k)));
        return e * per_mean;
    };

    GofResult g;
    double tv = 0.0;
    std::vector<double> bo;
    std::vector<double> be;
    double acc_o = 0.0;
    double acc_e = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        const double e = expected(k);
        tv += std::abs(obs[k] - e);
        acc_o += obs[k];
        acc_e += e;
        if (acc_e >= 5.0) {
            bo.push_back(acc_o);
            be.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    const double tail = tail_above(kmax);
    tv += tail;
    acc_e += tail;
    if (acc_e >= 5.0 || be.empty()) {
        bo.push_back(acc_o);
        be.push_back(acc_e);
    } else {
        bo.back() += acc_o;
        be.back() += acc_e;
    }
    for (std::size_t i = 0; i < bo.size(); ++i) g.chi_square += (bo[i] - be[i]) * (bo[i] - be[i]) / be[i];
    g.dof = static_cast<double>(bo.size()) - 1.0;
    if (g.dof >= 1.0) {
        boost::math::chi_squared_distribution<double> chi(g.dof);
        g.p_value = boost::math::cdf(boost::math::complement(chi, g.chi_square));
    } else {
        g.p_value = std::numeric_limits<double>::quiet_NaN();
    }
    g.tv_distance = 0.5 * tv / n;
    return g;
}

// Equal intervals (lo + i w, lo + (i+1) w], i < count.
inline std::vector<std::pair<double, double>> equal_intervals(double lo, double hi, std::size_t count) {
    if (!(hi > lo) || count == 0) throw DomainError("equal_intervals: need hi > lo and count > 0");
    std::vector<std::pair<double, double>> out;
    const double w = (hi - lo) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) out.emplace_back(lo + w * i, i + 1 == count ? hi : lo + w * (i + 1));
    return out;
}

// For each spacing delta, a translated lattice of spacing delta with retention
// xi = delta lambda_I keeps the intensity lambda_I fixed; counts in the given
// intervals are tested against Poisson(lambda_I |interval|).
inline std::vector<ConvergenceRow> mc_convergence_bl_to_ppp(double lambda_i, const std::vector<double>& deltas,
                                                            const std::vector<std::pair<double, double>>& intervals,
                                                            const McConfig& mc) {
    mc.validate();
    if (!(lambda_i > 0.0)) throw DomainError("mc_convergence: lambda_I must be > 0");
    if (intervals.empty()) throw DomainError("mc_convergence: no intervals");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::vector<double> means;
    for (const auto& [a, b] : intervals) {
        if (!(a >= 0.0 && b > a)) throw DomainError("mc_convergence: intervals must satisfy 0 <= lo < hi");
        lo = std::min(lo, a);
        hi = std::max(hi, b);
        means.push_back(lambda_i * (b - a));
    }
    std::vector<ConvergenceRow> rows;
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        const double delta = deltas[d];
        const double xi = delta * lambda_i;
        if (!(delta > 0.0) || xi > 1.0 + 1e-12) {
            throw DomainError("mc_convergence: each delta needs 0 < delta lambda_I <= 1");
        }
        const Lane lane{0.0, 1.0 / delta};
        const MediumAccess access{std::min(xi, 1.0)};
        const std::size_t per = intervals.size();
        std::vector<std::size_t> counts(mc.replicates * per);
        // one key per delta so rows are independent experiments
        const std::uint64_t key = mc.master_seed ^ (0x9E3779B97F4A7C15ULL * (d + 1));
        numerics::parallel_for(mc.replicates, mc.threads, [&](std::size_t r) {
            CounterRng rng(key, r);
            const auto p = geometry::sample_lattice(lane, access, 0.0, hi, rng);
            const auto c = geometry::count_in_intervals(p, intervals);
            std::copy(c.begin(), c.end(), counts.begin() + static_cast<std::ptrdiff_t>(r * per));
        });
        rows.push_back({delta, xi, poisson_gof(counts, means)});
    }
    return rows;
}

}  // namespace radarsg::montecarlo
