#include "scos/physics.hpp"

#include <cmath>
#include <string>

#include "scos/errors.hpp"

namespace scos {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v))
        throw InputError(std::string(what) + " must be finite and > 0");
}

} // namespace

void validate_uav(const UavType& uav) {
    require_positive(uav.battery_mah, "uav battery capacity");
    require_positive(uav.mass_kg, "uav mass");
    require_positive(uav.blade_angular_velocity, "uav blade angular velocity");
    require_positive(uav.cpu_rate, "uav cpu rate");
    require_positive(uav.cycles_per_bit, "uav cycles per bit");
    require_positive(uav.bandwidth_hz, "uav bandwidth");
    require_positive(uav.tx_power_w, "uav transmit power");
    require_positive(uav.rx_power_w, "uav receive power");
    require_positive(uav.hover_height_m, "uav hover height");
}

void validate_environment(const Environment& env) {
    require_positive(env.air_density, "air density");
    require_positive(env.rotor_radius, "rotor radius");
    require_positive(env.rotor_disc_area, "rotor disc area");
    require_positive(env.tip_speed, "tip speed");
    require_positive(env.induced_velocity, "induced velocity");
    require_positive(env.fuselage_drag_ratio, "fuselage drag ratio");
    require_positive(env.rotor_solidity, "rotor solidity");
    require_positive(env.profile_drag, "profile drag coefficient");
    require_positive(env.induced_power_correction, "induced power correction");
    require_positive(env.channel_gain_ref, "reference channel gain");
    require_positive(env.noise_power_w, "noise power");
    switch (env.bits_per_symbol) {
    case 1: case 2: case 4: case 6: case 8: break;
    default: throw InputError("bits_per_symbol must be one of 1,2,4,6,8");
    }
}

double blade_profile_power(const UavType& uav, const Environment& env) {
    const double w = uav.blade_angular_velocity;
    const double r = env.rotor_radius;
    return env.profile_drag / 8.0 * env.air_density * env.rotor_solidity * env.rotor_disc_area *
           w * w * w * r * r * r;
}

double induced_power(const UavType& uav, const Environment& env) {
    const double weight = uav.mass_kg * kGravity;
    return (1.0 + env.induced_power_correction) * std::pow(weight, 1.5) /
           std::sqrt(2.0 * env.rotor_disc_area * env.air_density);
}

double propulsion_power(const UavType& uav, const Environment& env, double speed) {
    if (!(speed >= 0) || !std::isfinite(speed))
        throw InputError("propulsion_power: speed must be >= 0");
    const double p0 = blade_profile_power(uav, env);
    const double p1 = induced_power(uav, env);
    const double v2 = speed * speed;
    const double v0 = env.induced_velocity;
    const double v04 = v0 * v0 * v0 * v0;
    const double blade = p0 * (1.0 + 3.0 * v2 / (env.tip_speed * env.tip_speed));
    const double induced = p1 * std::sqrt(std::sqrt(1.0 + v2 * v2 / (4.0 * v04)) - v2 / (2.0 * v0 * v0));
    // no solidity factor in the drag term, as the model is written
    const double drag = 0.5 * env.fuselage_drag_ratio * env.air_density * env.rotor_disc_area * v2 * speed;
    return blade + induced + drag;
}

double hover_power(const UavType& uav, const Environment& env) {
    return blade_profile_power(uav, env) + induced_power(uav, env);
}

double squared_distance(const Position3D& p, const Position3D& q) {
    const double da = p.a - q.a;
    const double db = p.b - q.b;
    const double dh = p.h - q.h;
    return da * da + db * db + dh * dh;
}

double link_rate(const UavType& uav, const Environment& env, const Position3D& uav_pos,
                 const Position3D& bs_pos) {
    if (!(uav_pos.h > bs_pos.h))
        throw InputError("link_rate: UAV height must exceed BS height");
    const double d2 = squared_distance(uav_pos, bs_pos);
    if (!(d2 > 0))
        throw InputError("link_rate: coincident positions");
    const double gain = env.channel_gain_ref / d2;
    return uav.bandwidth_hz * std::log2(1.0 + uav.tx_power_w * gain / env.noise_power_w);
}

TaskTimings local_timings(const UavType& uav, const Environment& env, long long n,
                          const CodeSplit& split) {
    const SymbolCounts sc = symbol_counts(n, split, 0, 1);
    const double bits = static_cast<double>(env.bits_per_symbol);
    const double per_bit = uav.cycles_per_bit / uav.cpu_rate;
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    TaskTimings t;
    t.t_local = per_bit * bits * sc.d_cmp;
    t.t_enc = per_bit * bits * n2;
    t.t_dec = per_bit * bits * sc.d_dec;
    return t;
}

TaskTimings task_timings(const UavType& uav, const Environment& env, long long n,
                         const CodeSplit& split, double rate_to, double rate_from) {
    if (!(rate_to > 0) || !(rate_from > 0))
        throw InputError("task_timings: link rates must be > 0");
    TaskTimings t = local_timings(uav, env, n, split);
    const SymbolCounts sc = symbol_counts(n, split, 0, 1);
    const double bits = static_cast<double>(env.bits_per_symbol);
    t.t_to = bits * sc.d_comm_to / rate_to;
    t.e_receive = uav.rx_power_w * bits * sc.d_comm_fr / rate_from;
    return t;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace scos
