#pragma once

namespace eela {

// Underwater acoustic channel description. Transmission loss over a range R is
//   TL(R) = 10*log10(a_norm) + 10*k*log10(R) + (R/1000)*alpha(f)   [dB]
// with alpha(f) the Thorp absorption coefficient in dB/km, and the transmit
// power required to be detected at range R is p0_watts * 10^(TL/10).
struct ChannelParams {
    double frequency_khz = 22.0;
    double spreading_k = 1.5;
    double a_norm = 1.0;
    double p0_watts = 1e-9;          // receiver detection power
    double sound_speed_mps = 1500.0;
    double min_range_m = 1.0;        // clamp floor; keeps log10 away from R=0
    double r_upper_m = 8660.254037844386;  // ceiling for the power->range inverse

    void validate() const;  // throws std::invalid_argument
};

// Thorp absorption coefficient in dB/km. Piecewise in frequency; the branch
// boundary f = 0.4 kHz uses the high-frequency branch.
double absorption_db_per_km(double frequency_khz);

// Transmission loss in dB at the given range. Ranges below min_range_m are
// clamped, not rejected. Strictly increasing in range.
double attenuation_db(double range_m, const ChannelParams& params);

// Transmit power (watts) required to be detected at range_m.
double power_for_range(double range_m, const ChannelParams& params);

// dP/dR of power_for_range at range_m, in W/m.
double power_slope(double range_m, const ChannelParams& params);

// g(min_range_m): smallest meaningful transmit power.
double power_floor(const ChannelParams& params);

struct RangeSolution {
    double range_m = 0.0;
    bool saturated = false;  // power exceeded the channel's r_upper_m reach
};

// Numeric inverse of power_for_range by bisection to 1e-9 relative tolerance.
// Powers below the floor return min_range_m; powers beyond g(r_upper_m)
// return r_upper_m with the saturated flag set.
RangeSolution range_for_power_checked(double power_watts, const ChannelParams& params);
double range_for_power(double power_watts, const ChannelParams& params);

// dR/dP of the inverse at the given power, i.e. 1 / power_slope(g^{-1}(P)).
double inverse_slope(double power_watts, const ChannelParams& params);

double propagation_delay(double distance_m, const ChannelParams& params);

}  // namespace eela
