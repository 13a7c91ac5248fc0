#include "eela/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eela {

void ChannelParams::validate() const {
    if (!(frequency_khz > 0.0)) throw std::invalid_argument("frequency_khz must be > 0");
    if (!(spreading_k > 0.0)) throw std::invalid_argument("spreading_k must be > 0");
    if (!(a_norm > 0.0)) throw std::invalid_argument("a_norm must be > 0");
    if (!(p0_watts > 0.0)) throw std::invalid_argument("p0_watts must be > 0");
    if (!(sound_speed_mps > 0.0)) throw std::invalid_argument("sound_speed_mps must be > 0");
    if (!(min_range_m > 0.0)) throw std::invalid_argument("min_range_m must be > 0");
    if (!(r_upper_m > min_range_m)) throw std::invalid_argument("r_upper_m must exceed min_range_m");
}

double absorption_db_per_km(double f) {
    if (!(f > 0.0)) throw std::invalid_argument("absorption_db_per_km: frequency must be > 0");
    const double f2 = f * f;
    if (f >= 0.4) {
        return 0.003 + 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2;
    }
    return 0.002 + 0.11 * f2 / (1.0 + f2) + 0.011 * f2;
}

double attenuation_db(double range_m, const ChannelParams& p) {
    const double r = std::max(range_m, p.min_range_m);
    const double alpha = absorption_db_per_km(p.frequency_khz);
    return 10.0 * std::log10(p.a_norm) + 10.0 * p.spreading_k * std::log10(r) +
           (r / 1000.0) * alpha;
}

double power_for_range(double range_m, const ChannelParams& p) {
    return p.p0_watts * std::pow(10.0, attenuation_db(range_m, p) / 10.0);
}

double power_slope(double range_m, const ChannelParams& p) {
    const double r = std::max(range_m, p.min_range_m);
    const double alpha = absorption_db_per_km(p.frequency_khz);
    // dP/dR = P(R) * (k/R + alpha*ln10/1e4)
    return power_for_range(r, p) * (p.spreading_k / r + alpha * std::log(10.0) / 1e4);
}

double power_floor(const ChannelParams& p) {
    return power_for_range(p.min_range_m, p);
}

RangeSolution range_for_power_checked(double power_watts, const ChannelParams& p) {
    if (!(power_watts > 0.0)) return {p.min_range_m, false};
    // Bisect on the dB scale; TL is strictly increasing in range.
    const double target_db = 10.0 * std::log10(power_watts / p.p0_watts);
    if (target_db <= attenuation_db(p.min_range_m, p)) return {p.min_range_m, false};
    if (target_db >= attenuation_db(p.r_upper_m, p)) return {p.r_upper_m, true};
    double lo = p.min_range_m;
    double hi = p.r_upper_m;
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (attenuation_db(mid, p) < target_db) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), false};
}

double range_for_power(double power_watts, const ChannelParams& p) {
    return range_for_power_checked(power_watts, p).range_m;
}

double inverse_slope(double power_watts, const ChannelParams& p) {
    return 1.0 / power_slope(range_for_power(power_watts, p), p);
}

double propagation_delay(double distance_m, const ChannelParams& p) {
    if (distance_m < 0.0) throw std::invalid_argument("propagation_delay: negative distance");
    return distance_m / p.sound_speed_mps;
}

}  // namespace eela
