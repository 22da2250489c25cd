#pragma once

// Samplers for interferer positions on one lane. Positions are longitudinal
// distances x along the half-line ahead of the typical vehicle; a vehicle is
// an interferer only if it lies inside the antenna cone (x > delta_o) and
// collides in the medium-access sense (independent retention with prob xi).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "radarsg/errors.hpp"
#include "radarsg/model.hpp"
#include "radarsg/rng.hpp"

namespace radarsg::geometry {

struct PointPattern {
    std::vector<double> positions;  // sorted, all in (delta_o, window]
    std::size_t lane_index = 0;
    double delta_o = 0.0;
    double window = 0.0;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
};

namespace detail {
inline void check_window(double delta_o, double window) {
    if (!(delta_o >= 0.0)) throw DomainError("sampler: delta_o must be >= 0");
    if (!(window > delta_o)) throw DomainError("sampler: window must exceed delta_o");
}
}  // namespace detail

// Thinned PPP of intensity xi*lambda on (delta_o, window], built from
// exponential gaps so the points come out sorted.
inline PointPattern sample_ppp(const Lane& lane, const MediumAccess& access, double delta_o, double window,
                               CounterRng& rng, std::size_t lane_index = 0) {
    detail::check_window(delta_o, window);
    PointPattern p{{}, lane_index, delta_o, window};
    const double rate = access.duty_cycle * lane.density;
    if (rate <= 0.0) return p;
    p.positions.reserve(static_cast<std::size_t>(rate * (window - delta_o) * 1.2) + 8);
    double x = delta_o + rng.exponential(rate);
    while (x <= window) {
        p.positions.push_back(x);
        x += rng.exponential(rate);
    }
    return p;
}

// Bernoulli lattice with a given translation u in [0, 1): sites
// delta_o + (m + u) delta, m = 0, 1, ..., each kept with probability xi.
// Retained sites are found by geometric skips, so the cost is proportional to
// the number of interferers rather than the number of sites.
inline PointPattern sample_lattice_shifted(const Lane& lane, const MediumAccess& access, double delta_o,
                                           double window, double u, CounterRng& rng,
                                           std::size_t lane_index = 0) {
    detail::check_window(delta_o, window);
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("sample_lattice: translation must be in [0, 1)");
    PointPattern p{{}, lane_index, delta_o, window};
    const double xi = access.duty_cycle;
    if (xi <= 0.0) return p;
    const double spacing = 1.0 / lane.density;
    const double last = std::floor((window - delta_o) / spacing - u);
    if (last < 0.0) return p;
    const auto sites = static_cast<std::uint64_t>(last) + 1;  // m in [0, sites)

    p.positions.reserve(static_cast<std::size_t>(xi * static_cast<double>(sites) * 1.2) + 8);
    // The site at m = 0 with u = 0 sits exactly on delta_o and is not inside the cone.
    std::uint64_t m = (u == 0.0) ? 1 : 0;
    while (true) {
        const std::uint64_t skip = rng.geometric_failures(xi);
        if (skip >= sites || m >= sites - skip) break;
        m += skip;
        const double x = delta_o + (static_cast<double>(m) + u) * spacing;
        if (x > window) break;
        p.positions.push_back(x);
        ++m;
    }
    return p;
}

// Bernoulli lattice with the translation drawn first from the stream.
inline PointPattern sample_lattice(const Lane& lane, const MediumAccess& access, double delta_o, double window,
                                   CounterRng& rng, std::size_t lane_index = 0) {
    const double u = rng.uniform();
    return sample_lattice_shifted(lane, access, delta_o, window, u, rng, lane_index);
}

inline PointPattern sample(Geometry kind, const Lane& lane, const MediumAccess& access, double delta_o,
                           double window, CounterRng& rng, std::size_t lane_index = 0) {
    return kind == Geometry::PPP ? sample_ppp(lane, access, delta_o, window, rng, lane_index)
                                 : sample_lattice(lane, access, delta_o, window, rng, lane_index);
}

// sqrt(x^2 + L^2) per point.
inline std::vector<double> euclidean_distances(const PointPattern& pattern, double lane_offset) {
    std::vector<double> out;
    out.reserve(pattern.size());
    for (double x : pattern.positions) out.push_back(lane_offset == 0.0 ? x : std::hypot(x, lane_offset));
    return out;
}

// Counts of points in half-open intervals (lo, hi]. Intervals may touch but
// not overlap; they need not be sorted.
inline std::vector<std::size_t> count_in_intervals(const PointPattern& pattern,
                                                   const std::vector<std::pair<double, double>>& intervals) {
    std::vector<std::size_t> order(intervals.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!(intervals[i].first < intervals[i].second)) throw DomainError("count_in_intervals: empty interval");
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return intervals[a].first < intervals[b].first; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (intervals[order[k - 1]].second > intervals[order[k]].first) {
            throw DomainError("count_in_intervals: intervals overlap");
        }
    }
    const auto& xs = pattern.positions;
    std::vector<std::size_t> counts(intervals.size(), 0);
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto lo = std::upper_bound(xs.begin(), xs.end(), intervals[i].first);
        const auto hi = std::upper_bound(xs.begin(), xs.end(), intervals[i].second);
        counts[i] = static_cast<std::size_t>(hi - lo);
    }
    return counts;
}

}  // namespace radarsg::geometry
