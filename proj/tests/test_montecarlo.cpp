#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "oracles.hpp"
#include "radarsg/montecarlo.hpp"

using namespace radarsg;
using namespace radarsg::montecarlo;

namespace {

McConfig small_config(std::size_t reps = 2000, unsigned threads = 1) {
    McConfig mc;
    mc.replicates = reps;
    mc.threads = threads;
    mc.master_seed = 12345;
    return mc;
}

Scenario worst_case_scenario(double density, double xi) {
    Scenario s;
    s.lanes = {Lane{0.0, density}};
    s.access.duty_cycle = xi;
    return s;
}

}  // namespace

TEST(McConfig, Validation) {
    McConfig mc;
    EXPECT_NO_THROW(mc.validate());
    mc.replicates = 99;
    EXPECT_THROW(mc.validate(), InvariantError);
    mc = McConfig{};
    mc.window = 0.0;
    EXPECT_THROW(mc.validate(), InvariantError);
}

TEST(McInterference, SilentMediumGivesZeros) {
    Scenario s;
    s.access.duty_cycle = 0.0;
    const auto r = mc_interference(s, small_config(200));
    for (double v : r.samples) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.mean.value, 0.0);
    EXPECT_EQ(r.empirical_cdf.grid.size(), 1u);
    EXPECT_EQ(r.empirical_cdf(0.0), 1.0);
}

TEST(McInterference, DeterministicAcrossThreads) {
    Scenario s;
    s.fading = FadingModel::rayleigh();
    const auto a = mc_interference(s, small_config(1000, 1));
    const auto b = mc_interference(s, small_config(1000, 4));
    const auto c = mc_interference(s, small_config(1000, 3));
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_EQ(a.samples, c.samples);
    s.geometry = Geometry::BernoulliLattice;
    EXPECT_EQ(interference_samples(s, small_config(500, 1)), interference_samples(s, small_config(500, 4)));
}

TEST(McInterference, MeanMatchesWindowedCampbell) {
    Scenario s;
    auto mc = small_config(5000);
    const auto r = mc_interference(s, mc);
    const auto c = derive(s, 0);
    // Campbell mean restricted to (delta_o, W]
    const double body = oracle::simpson([&](double u) { return 1.0 / (100.0 + u * u); }, c.delta_o, mc.window, 200000);
    const double expect = 0.01 * c.gamma1 * c.radar.tx_power * body;
    EXPECT_FALSE(r.mean_suppressed);
    EXPECT_NEAR(r.mean.value, expect, r.mean.ci_halfwidth);
    EXPECT_GT(r.mean.ci_halfwidth, 0.0);
    EXPECT_EQ(r.mean.replicates, 5000u);
}

TEST(McInterference, LevyRegimeSuppressesMean) {
    const auto r = mc_interference(worst_case_scenario(0.1, 0.1), small_config(200));
    EXPECT_TRUE(r.mean_suppressed);
    EXPECT_TRUE(std::isnan(r.mean.value));
    EXPECT_FALSE(r.warning.empty());
}

TEST(McInterference, EmpiricalCdfIsRightContinuousStep) {
    const auto c = empirical_cdf({3.0, 1.0, 2.0, 2.0});
    EXPECT_EQ(c.grid, (std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_EQ(c.cdf, (std::vector<double>{0.25, 0.75, 1.0}));
    EXPECT_EQ(c(0.99), 0.0);
    EXPECT_EQ(c(2.0), 0.75);
    EXPECT_EQ(c(2.5), 0.75);
}

TEST(McInterference, KsAgainstAnalyticPpp) {
    Scenario s;
    const auto mc = small_config(5000);
    const auto r = mc_interference(s, mc);
    auto sorted = r.samples;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> grid;
    for (int i = 1; i < 40; ++i) grid.push_back(sorted[static_cast<std::size_t>(i * 5000 / 40)]);
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto analytic = interference::cdf_ppp(interference::CfSpec::from_scenario(s), grid);
    double ks = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) ks = std::max(ks, std::abs(analytic.cdf[i] - r.empirical_cdf(grid[i])));
    EXPECT_LT(ks, 1.628 / std::sqrt(5000.0));
}

TEST(McInterference, BinaryDumpRoundTrip) {
    const std::vector<double> v{1.5, -0.0, 3e-300, 7.0};
    const std::string path = ::testing::TempDir() + "radarsg_samples.bin";
    write_samples_binary(path, v);
    std::ifstream f(path, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    ASSERT_EQ(bytes.size(), 32u);
    // 1.5 = 0x3FF8000000000000, least significant byte first
    EXPECT_EQ(bytes[0], 0x00);
    EXPECT_EQ(bytes[6], 0xF8);
    EXPECT_EQ(bytes[7], 0x3F);
    std::remove(path.c_str());
}

TEST(McRanging, ThresholdToZeroAlwaysSucceeds) {
    Scenario s;
    s.radar.sinr_threshold = 1e-300;
    const auto c = mc_ranging_success(s, {10.0, 100.0, 250.0}, small_config(200));
    for (double v : c.values) EXPECT_EQ(v, 1.0);
}

TEST(McRanging, FarTargetFails) {
    Scenario s;
    const auto c = mc_ranging_success(s, {1e5, 1e6}, small_config(200));
    for (double v : c.values) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(mc_ranging_success(s, {10.0, 5.0}, small_config(200)), DomainError);
}

TEST(McRanging, WorstCaseWithinBinomialInterval) {
    // the Levy law needs interferers far beyond 10 km to be represented
    const auto s = worst_case_scenario(1.0 / 50, 0.01);
    auto mc = small_config(5000);
    mc.window = 2e6;
    std::vector<double> ranges;
    for (int i = 0; i < 20; ++i) ranges.push_back(10.0 + 240.0 * i / 19.0);
    const auto curve = mc_ranging_success(s, ranges, mc);
    const auto c = derive(s, 0);
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const double p = performance::p_success_il(c, ranges[i], s.access, s.lanes[0]);
        EXPECT_GE(p, curve.ci_lower[i]) << ranges[i];
        EXPECT_LE(p, curve.ci_upper[i]) << ranges[i];
    }
}

TEST(McRanging, BinomialIntervalProperties) {
    const auto [lo, hi] = binomial_ci99(50, 100);
    EXPECT_LT(lo, 0.5);
    EXPECT_GT(hi, 0.5);
    EXPECT_NEAR(0.5 - lo, hi - 0.5, 1e-12);
    EXPECT_EQ(binomial_ci99(0, 100).first, 0.0);
    EXPECT_EQ(binomial_ci99(100, 100).second, 1.0);
}

TEST(PoissonGof, AcceptsPoissonRejectsConstant) {
    std::vector<std::size_t> pois;
    for (std::uint64_t r = 0; r < 20000; ++r) {
        CounterRng rng(9, r);
        // count of unit-rate exponential arrivals in (0, 5]
        std::size_t k = 0;
        double t = rng.exponential(1.0);
        while (t <= 5.0) {
            ++k;
            t += rng.exponential(1.0);
        }
        pois.push_back(k);
    }
    const auto good = poisson_gof(pois, {5.0});
    EXPECT_GT(good.p_value, 0.01);
    EXPECT_LT(good.tv_distance, 0.02);
    const std::vector<std::size_t> constant(20000, 5);
    const auto bad = poisson_gof(constant, {5.0});
    EXPECT_LT(bad.p_value, 1e-10);
    EXPECT_NEAR(bad.tv_distance, 1.0 - 0.17546736976785068, 1e-6);
}

TEST(Convergence, LatticeApproachesPoisson) {
    auto mc = small_config(2000);
    const auto iv = equal_intervals(0.0, 10000.0, 20);
    const auto rows = mc_convergence_bl_to_ppp(0.01, {100.0, 50.0, 25.0, 12.5}, iv, mc);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NEAR(rows[0].duty_cycle, 1.0, 1e-12);
    EXPECT_LT(rows[0].gof.p_value, 0.01);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].gof.tv_distance, rows[i - 1].gof.tv_distance);
    EXPECT_THROW(mc_convergence_bl_to_ppp(0.01, {200.0}, iv, mc), DomainError);
}

TEST(Convergence, DeterministicAcrossThreads) {
    const auto iv = equal_intervals(0.0, 2000.0, 4);
    const auto a = mc_convergence_bl_to_ppp(0.01, {10.0, 1.0}, iv, small_config(300, 1));
    const auto b = mc_convergence_bl_to_ppp(0.01, {10.0, 1.0}, iv, small_config(300, 4));
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].gof.chi_square, b[i].gof.chi_square);
        EXPECT_EQ(a[i].gof.tv_distance, b[i].gof.tv_distance);
    }
}
