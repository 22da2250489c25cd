#include <gtest/gtest.h>

#include <cmath>

#include "radarsg/model.hpp"

using namespace radarsg;

TEST(Units, Conversions) {
    EXPECT_EQ(db_to_linear(0.0), 1.0);
    EXPECT_NEAR(dbm_to_watts(10.0), 0.01, 1e-17);
    EXPECT_NEAR(db_to_linear(45.0), 31622.776601683792, 1e-9);
    EXPECT_NEAR(db_to_linear(30.0), 1000.0, 1e-10);
}

TEST(Units, RoundTrip) {
    for (int i = -50; i <= 50; ++i) {
        const double x = 1.37 * i;
        EXPECT_NEAR(linear_to_db(db_to_linear(x)), x, 1e-12 * std::max(1.0, std::abs(x)));
        EXPECT_NEAR(watts_to_dbm(dbm_to_watts(x)), x, 1e-12 * std::max(1.0, std::abs(x)));
        const double lin = std::pow(10.0, 0.1 * i);
        EXPECT_NEAR(db_to_linear(linear_to_db(lin)), lin, 1e-12 * lin);
    }
}

TEST(Derive, TableOneConstants) {
    Scenario s;
    const auto d = derive(s, 0);
    const double expected_gamma1 = std::pow(10.0, 4.5) * std::pow(10.0, 4.5) *
                                   std::pow(2.99792458e8 / (4.0 * kPi * 76.5e9), 2.0);
    EXPECT_NEAR(d.gamma1, expected_gamma1, 1e-12 * expected_gamma1);
    EXPECT_NEAR(d.gamma1, 97.3, 0.05);
    EXPECT_NEAR(d.gamma2, 1000.0 / (4.0 * kPi), 1e-12);
    EXPECT_NEAR(d.gamma2, 79.577, 1e-3);
    EXPECT_NEAR(d.delta_o, 76.0, 0.05);
    EXPECT_NEAR(d.delta_o, 10.0 / std::tan(deg_to_rad(7.5)), 1e-12);
    EXPECT_EQ(d.offset, 10.0);
}

TEST(Derive, CoefficientSelfCheck) {
    const auto d = derive(Scenario{}, 0);
    EXPECT_NEAR(d.c_coeff, kPi / 10.0, 1e-14);
    EXPECT_NEAR(d.big_c(100.0), 1000.0 * kPi, 1e-9);
    EXPECT_NEAR(d.big_k * d.c_coeff, d.z_o, 1e-15);
    EXPECT_NEAR(d.big_k, 0.531597 * 10.0 / kPi, 1e-4);
    // K R^2 / C = z0 R^2 / (C^2 / R^2) ... equivalently K = z0 R^2 / C.
    for (double r : {10.0, 80.0, 250.0}) EXPECT_NEAR(d.big_k, d.z_o * r * r / d.big_c(r), 1e-12);
}

TEST(Derive, GuardDistanceBehaviour) {
    double prev = INFINITY;
    for (int deg = 5; deg <= 175; deg += 5) {
        const double v = guard_distance(10.0, deg_to_rad(deg));
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_EQ(guard_distance(0.0, deg_to_rad(15.0)), 0.0);
    EXPECT_EQ(guard_distance(10.0, kPi), 0.0);

    Scenario s;
    s.radar.beamwidth = kPi;
    EXPECT_EQ(derive(s, 0).delta_o, 0.0);
}

TEST(Derive, NeglectOffsetKeepsGuard) {
    Scenario s;
    s.neglect_offset_in_distance = true;
    const auto d = derive(s, 0);
    EXPECT_EQ(d.offset, 0.0);
    EXPECT_NEAR(d.delta_o, 76.0, 0.05);
}

TEST(Derive, LaneIndexChecked) {
    EXPECT_THROW(derive(Scenario{}, 1), DomainError);
}

TEST(Scenario, Validation) {
    Scenario s;
    EXPECT_NO_THROW(s.validate());

    auto bad = s;
    bad.access.duty_cycle = 1.5;
    try {
        bad.validate();
        FAIL();
    } catch (const InvariantError& e) {
        EXPECT_EQ(e.field(), "duty_cycle");
    }

    bad = s;
    bad.lanes.clear();
    EXPECT_THROW(bad.validate(), InvariantError);

    bad = s;
    bad.lanes[0].density = 0.0;
    try {
        bad.validate();
        FAIL();
    } catch (const InvariantError& e) {
        EXPECT_EQ(e.field(), "lanes[0].density");
    }

    bad = s;
    bad.radar.pathloss_exp = 1.0;
    EXPECT_THROW(bad.validate(), InvariantError);

    bad = s;
    bad.radar.beamwidth = 4.0;
    EXPECT_THROW(bad.validate(), InvariantError);

    bad = s;
    bad.radar.noise_power = -1.0;
    EXPECT_THROW(bad.validate(), InvariantError);
}

TEST(Fading, UnitAndRayleigh) {
    const auto unit = FadingModel::unit();
    EXPECT_TRUE(unit.is_unit());
    EXPECT_NEAR(std::abs(unit.char_fn({2.0, 0.0}) - std::exp(Complex(0.0, 2.0))), 0.0, 1e-15);

    const auto ray = FadingModel::rayleigh();
    EXPECT_NO_THROW(ray.validate());
    EXPECT_FALSE(ray.bounded);
    const Complex t(1.3, 0.4);
    const Complex by_density = ray.expect([&](double g) { return std::exp(Complex(0.0, 1.0) * t * g); });
    EXPECT_NEAR(std::abs(ray.char_fn(t) - by_density), 0.0, 1e-9);

    CounterRng rng(7, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += ray.draw(rng);
    EXPECT_NEAR(sum / n, 1.0, 0.01);
}

TEST(Fading, CustomMeanMustBeOne) {
    auto m = FadingModel::rayleigh();
    m.density = [](double g) { return 0.5 * std::exp(-0.5 * g); };
    m.transform = nullptr;
    EXPECT_THROW(m.validate(), InvariantError);
}
