#include <gtest/gtest.h>

#include <cmath>

#include "scos/cost.hpp"
#include "scos/errors.hpp"

using namespace scos;

namespace {

UavType type_with(double battery, double mass) {
    UavType u;
    u.battery_mah = battery;
    u.mass_kg = mass;
    u.blade_angular_velocity = 400;
    u.cpu_rate = 1e9;
    u.cycles_per_bit = 20;
    u.bandwidth_hz = 2e6;
    u.tx_power_w = 0.032;
    u.rx_power_w = 0.032;
    u.hover_height_m = 100;
    return u;
}

} // namespace

TEST(Phase1Costs, ReservationAndOnDemand) {
    CostCoefficients c;
    EXPECT_NEAR(reservation_cost(type_with(2375, 8), c), 2.375, 1e-12);
    EXPECT_NEAR(reservation_cost(type_with(5200, 12), c), 5.2, 1e-12);
    std::vector<UavType> fleet{type_with(2375, 8), type_with(3500, 10), type_with(5200, 12)};
    EXPECT_NEAR(on_demand_cost(fleet[2], fleet, c), 7.8, 1e-12);
    EXPECT_THROW(on_demand_cost(fleet[1], fleet, c), InputError);
    CostCoefficients zero = c;
    zero.alpha1 = 0;
    EXPECT_EQ(reservation_cost(fleet[0], zero), 0.0);
    CostCoefficients eq = c;
    eq.alpha2 = eq.alpha1;
    EXPECT_THROW(validate_coefficients(eq), InputError);
}

TEST(Phase2Costs, LocalCopy) {
    CostCoefficients c;
    Environment env;
    const CodeSplit sp = make_split(1, 2);
    UavType u = type_with(5200, 10);
    EXPECT_NEAR(local_copy_cost(u, env, 240, sp, c), 0.5 * (0.27648 + 0.004608), 1e-12);
    UavType fast = u;
    fast.cpu_rate *= 2;
    EXPECT_NEAR(local_copy_cost(fast, env, 240, sp, c), 0.5 * local_copy_cost(u, env, 240, sp, c), 1e-12);
    CostCoefficients z = c;
    z.alpha3 = 0;
    EXPECT_EQ(local_copy_cost(u, env, 240, sp, z), 0.0);
}

TEST(Phase2Costs, OffloadCopy) {
    CostCoefficients c;
    Environment env;
    const CodeSplit sp = make_split(1, 2);
    UavType u = type_with(5200, 10);
    const double r = 7.43e6;
    const double t_to = 4 * 28800 / r, e = 0.032 * 4 * 14400 / r;
    EXPECT_NEAR(offload_copy_cost_at_rate(u, env, 240, sp, r, r, c),
                0.5 * (t_to + 0.004608) + 0.5 * e + 0.05, 1e-12);
    // huge rate limit
    EXPECT_NEAR(offload_copy_cost_at_rate(u, env, 240, sp, 1e30, 1e30, c), 0.5 * 0.004608 + 0.05, 1e-9);
    // service fee is additive and independent of N
    CostCoefficients c2 = c;
    c2.service = 1.05;
    for (long long n : {240, 480, 1080})
        EXPECT_NEAR(offload_copy_cost_at_rate(u, env, n, sp, r, r, c2) -
                        offload_copy_cost_at_rate(u, env, n, sp, r, r, c),
                    1.0, 1e-12);
}

TEST(Phase2Costs, HoverThreshold) {
    CostCoefficients c;
    Environment env;
    const CodeSplit sp = make_split(1, 2);
    UavType u = type_with(5200, 10);
    const double ph = hover_power(u, env);
    const double expect = 4 * (0.27648 + 0.004608) * 4 * 1e-4 * ph;
    EXPECT_NEAR(hover_threshold_cost(u, env, 240, sp, c), expect, 1e-12);
    EXPECT_NEAR(expect, 0.6062, 5e-4);
    CostCoefficients c3 = c;
    c3.alpha5 *= 3;
    EXPECT_NEAR(hover_threshold_cost(u, env, 240, sp, c3), 3 * expect, 1e-12);
    c3.alpha5 = 0;
    EXPECT_EQ(hover_threshold_cost(u, env, 240, sp, c3), 0.0);
}

TEST(Phase2Costs, Decode) {
    CostCoefficients c;
    Environment env;
    UavType u = type_with(5200, 10);
    EXPECT_NEAR(decode_cost(u, env, 240, make_split(1, 2), c), 0.5 * 921600.0 * 4 * 20 / 1e9, 1e-12);
    EXPECT_NEAR(decode_cost(u, env, 240, make_split(1, 2), c), 0.0369, 1e-4);
    EXPECT_EQ(decode_cost(u, env, 1, make_split(1, 1), c), 0.0);
}

// Small tasks favor local work, large tasks favor offloading, for a UAV and BS on
// opposite edges of the 1000 m square.
TEST(Phase2Costs, LocalVersusOffloadSignChange) {
    CostCoefficients c;
    Environment env;
    const CodeSplit sp = make_split(1, 2);
    UavType u = type_with(5200, 12);
    Position3D uav{0, 0, 100}, bs{1000, 600, 20};
    const double d240 = offload_copy_cost(u, env, 240, sp, uav, bs, c) - local_copy_cost(u, env, 240, sp, c);
    const double d1080 = offload_copy_cost(u, env, 1080, sp, uav, bs, c) - local_copy_cost(u, env, 1080, sp, c);
    EXPECT_GT(d240, 0);
    EXPECT_LT(d1080, 0);
}

TEST(Rounding, TwelveDigits) {
    EXPECT_EQ(round_sig12(0.1405440000000001), 0.140544);
    EXPECT_EQ(round_sig12(0.0), 0.0);
    EXPECT_EQ(round_sig12(1347.76548212345678), 1347.76548212);
}
