#pragma once

#include "scos/cdc.hpp"

namespace scos {

struct UavType {
    int id = 1;
    double battery_mah = 0;            // B_x
    double mass_kg = 0;                // weight force is mass * 9.8
    double blade_angular_velocity = 0; // rad/s
    double cpu_rate = 0;               // cycles/s
    double cycles_per_bit = 0;
    double bandwidth_hz = 0;
    double tx_power_w = 0;
    double rx_power_w = 0;
    double hover_height_m = 0;
};

struct Environment {
    double air_density = 1.225;
    double rotor_radius = 0.5;
    double rotor_disc_area = 0.79;
    double tip_speed = 200;
    double induced_velocity = 7.2;
    double fuselage_drag_ratio = 0.3;
    double rotor_solidity = 0.05;
    double profile_drag = 0.012;
    double induced_power_correction = 0.1;
    double channel_gain_ref = 1e-6; // linear, -60 dB
    double noise_power_w = 1e-13;   // -100 dBm
    int bits_per_symbol = 4;
};

struct Position3D {
    double a = 0;
    double b = 0;
    double h = 0;
};

inline constexpr double kGravity = 9.8;

void validate_uav(const UavType& uav);
void validate_environment(const Environment& env);

double blade_profile_power(const UavType& uav, const Environment& env); // P_{x,0}
double induced_power(const UavType& uav, const Environment& env);       // P_{x,1}
double propulsion_power(const UavType& uav, const Environment& env, double speed);
double hover_power(const UavType& uav, const Environment& env);

double squared_distance(const Position3D& p, const Position3D& q);

// LoS air-to-ground rate in bits/s. The reverse link uses the same formula.
double link_rate(const UavType& uav, const Environment& env, const Position3D& uav_pos,
                 const Position3D& bs_pos);

struct TaskTimings {
    double t_local = 0;
    double t_enc = 0;
    double t_dec = 0;
    double t_to = 0;
    double e_receive = 0;
};

TaskTimings task_timings(const UavType& uav, const Environment& env, long long n,
                         const CodeSplit& split, double rate_to, double rate_from);

// Timings without a link (t_to and e_receive left at zero).
TaskTimings local_timings(const UavType& uav, const Environment& env, long long n,
                          const CodeSplit& split);

double db_to_linear(double db);
double dbm_to_watts(double dbm);

} // namespace scos
