#include "scos/cost.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "scos/errors.hpp"

namespace scos {

void validate_coefficients(const CostCoefficients& c) {
    const double vals[] = {c.alpha1, c.alpha2, c.alpha3, c.alpha4, c.alpha5,
                           c.service, c.subscription, c.crash_penalty, c.terminal_penalty};
    for (double v : vals)
        if (!(v >= 0) || !std::isfinite(v))
            throw InputError("cost coefficients must be finite and >= 0");
    if (!(c.alpha2 > c.alpha1))
        throw InputError("on-demand coefficient alpha2 must exceed reservation coefficient alpha1");
}

double reservation_cost(const UavType& uav, const CostCoefficients& c) {
    return c.alpha1 * uav.battery_mah;
}

double on_demand_cost(const UavType& uav, const std::vector<UavType>& types,
                      const CostCoefficients& c) {
    for (const auto& other : types)
        if (other.battery_mah > uav.battery_mah)
            throw InputError("on_demand_cost: type " + std::to_string(uav.id) +
                             " is not the largest battery type");
    return c.alpha2 * uav.battery_mah;
}

double local_copy_cost(const UavType& uav, const Environment& env, long long n,
                       const CodeSplit& split, const CostCoefficients& c) {
    const TaskTimings t = local_timings(uav, env, n, split);
    return c.alpha3 * (t.t_local + t.t_enc);
}

double offload_copy_cost_at_rate(const UavType& uav, const Environment& env, long long n,
                                 const CodeSplit& split, double rate_to, double rate_from,
                                 const CostCoefficients& c) {
    const TaskTimings t = task_timings(uav, env, n, split, rate_to, rate_from);
    return c.alpha3 * (t.t_to + t.t_enc) + c.alpha4 * t.e_receive + c.service;
}

double offload_copy_cost(const UavType& uav, const Environment& env, long long n,
                         const CodeSplit& split, const Position3D& uav_pos,
                         const Position3D& bs_pos, const CostCoefficients& c) {
    const double r = link_rate(uav, env, uav_pos, bs_pos);
    return offload_copy_cost_at_rate(uav, env, n, split, r, r, c);
}

double hover_threshold_time(const UavType& uav, const Environment& env, long long n,
                            const CodeSplit& split) {
    const TaskTimings t = local_timings(uav, env, n, split);
    return static_cast<double>(split.k) * (t.t_local + t.t_enc);
}

double hover_threshold_cost(const UavType& uav, const Environment& env, long long n,
                            const CodeSplit& split, const CostCoefficients& c) {
    return hover_threshold_time(uav, env, n, split) * static_cast<double>(split.k) * c.alpha5 *
           hover_power(uav, env);
}

double decode_cost(const UavType& uav, const Environment& env, long long n,
                   const CodeSplit& split, const CostCoefficients& c) {
    return c.alpha3 * local_timings(uav, env, n, split).t_dec;
}

double round_sig12(double v) {
    if (v == 0 || !std::isfinite(v))
        return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return std::strtod(buf, nullptr);
}

} // namespace scos
