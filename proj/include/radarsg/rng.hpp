#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace radarsg {

// Counter-based random stream. Output i of the stream keyed by
// (master_seed, replicate) is a SplitMix64 finaliser applied to
// key + i * golden_gamma, so any replicate can be regenerated independently
// of how replicates are scheduled across threads.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t master_seed, std::uint64_t replicate)
        : key_(mix(mix(master_seed) ^ (replicate * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        counter_ += kGamma;
        return mix(key_ + counter_);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1].
    double uniform_open_low() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_open_low()) / rate; }

    // Number of failures before the first success of a Bernoulli(p) sequence.
    std::uint64_t geometric_failures(double p) {
        if (p >= 1.0) return 0;
        const double g = std::floor(std::log(uniform_open_low()) / std::log1p(-p));
        return g >= 9.0e18 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(g);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace radarsg
