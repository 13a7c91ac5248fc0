#include "eela/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eela/rng.hpp"

namespace eela {

void CurrentField::validate() const {
    if (peak_speed_mps < 0.0) throw std::invalid_argument("peak_speed_mps must be >= 0");
    if (!(meander_wavelength_m > 0.0)) throw std::invalid_argument("meander_wavelength_m must be > 0");
    if (meander_amplitude_m < 0.0) throw std::invalid_argument("meander_amplitude_m must be >= 0");
}

namespace {

struct RawVelocity {
    double u = 0.0;
    double v = 0.0;
};

// Stream-function gradient in jet-width units: u = -dpsi/dY, v = dpsi/dX.
RawVelocity raw_jet_velocity(double theta, double y_hat, double a_hat, double k_hat) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double ak_c = a_hat * k_hat * c;
    const double d2 = 1.0 + ak_c * ak_c;
    const double d = std::sqrt(d2);
    const double n = y_hat - a_hat * s;
    const double h = n / d;
    const double sech = 1.0 / std::cosh(h);
    const double sech2 = sech * sech;

    const double dd_dx = -(a_hat * a_hat) * (k_hat * k_hat * k_hat) * s * c / d;
    const double dh_dx = (-a_hat * c * k_hat * d - n * dd_dx) / d2;

    RawVelocity rv;
    rv.u = sech2 / d;
    rv.v = -sech2 * dh_dx;
    return rv;
}

double raw_speed(double theta, double y_hat, double a_hat, double k_hat) {
    const RawVelocity rv = raw_jet_velocity(theta, y_hat, a_hat, k_hat);
    return std::hypot(rv.u, rv.v);
}

// The speed along the jet core is exactly 1 by construction; a coarse grid
// plus local refinement finds whether anything off-core exceeds it.
double max_raw_speed(double a_hat, double k_hat) {
    constexpr int kTheta = 192;
    constexpr int kY = 192;
    const double two_pi = 2.0 * std::numbers::pi;
    const double y_span = 4.0 + a_hat;
    double best = 1.0;
    double best_theta = 0.0;
    double best_y = 0.0;
    for (int i = 0; i < kTheta; ++i) {
        const double theta = two_pi * i / kTheta;
        for (int j = 0; j <= kY; ++j) {
            const double y = -y_span + 2.0 * y_span * j / kY;
            const double sp = raw_speed(theta, y, a_hat, k_hat);
            if (sp > best) {
                best = sp;
                best_theta = theta;
                best_y = y;
            }
        }
    }
    // Coordinate-wise ternary refinement around the best cell.
    double t_lo = best_theta - two_pi / kTheta, t_hi = best_theta + two_pi / kTheta;
    double y_lo = best_y - 2.0 * y_span / kY, y_hi = best_y + 2.0 * y_span / kY;
    for (int round = 0; round < 40; ++round) {
        double m1 = t_lo + (t_hi - t_lo) / 3.0, m2 = t_hi - (t_hi - t_lo) / 3.0;
        if (raw_speed(m1, best_y, a_hat, k_hat) < raw_speed(m2, best_y, a_hat, k_hat)) {
            t_lo = m1;
        } else {
            t_hi = m2;
        }
        best_theta = 0.5 * (t_lo + t_hi);
        m1 = y_lo + (y_hi - y_lo) / 3.0;
        m2 = y_hi - (y_hi - y_lo) / 3.0;
        if (raw_speed(best_theta, m1, a_hat, k_hat) < raw_speed(best_theta, m2, a_hat, k_hat)) {
            y_lo = m1;
        } else {
            y_hi = m2;
        }
        best_y = 0.5 * (y_lo + y_hi);
    }
    best = std::max(best, raw_speed(best_theta, best_y, a_hat, k_hat));
    return best * (1.0 + 1e-9);  // bias the normalizer up so |v| never exceeds the peak
}

double reflect_into(double x, double hi) {
    if (hi <= 0.0) return 0.0;
    const double period = 2.0 * hi;
    double m = std::fmod(x, period);
    if (m < 0.0) m += period;
    return (m <= hi) ? m : period - m;
}

}  // namespace

MeanderingField::MeanderingField(const CurrentField& cfg, double region_side_m,
                                 double region_depth_m)
    : cfg_(cfg), side_(region_side_m), depth_(region_depth_m) {
    cfg_.validate();
    if (!(side_ > 0.0) || !(depth_ > 0.0)) {
        throw std::invalid_argument("MeanderingField: region dimensions must be > 0");
    }
    width_m_ = cfg_.meander_wavelength_m / 2.0;
    const double k_m = 2.0 * std::numbers::pi / cfg_.meander_wavelength_m;
    k_hat_ = k_m * width_m_;
    a_hat_ = cfg_.meander_amplitude_m / width_m_;
    y_center_ = side_ / 2.0;
    std::uint64_t s = cfg_.seed;
    x_offset_ = (static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53) * cfg_.meander_wavelength_m;
    scale_ = (a_hat_ > 0.0) ? cfg_.peak_speed_mps / max_raw_speed(a_hat_, k_hat_) : 0.0;
}

Vec3 MeanderingField::velocity_at(const Position3D& pos, double time_s) const {
    if (cfg_.meander_amplitude_m == 0.0) {
        return {cfg_.peak_speed_mps, 0.0, 0.0};  // plug-flow limit of the jet
    }
    const double theta =
        k_hat_ * (pos.x - x_offset_ - cfg_.phase_speed_mps * time_s) / width_m_;
    const double y_hat = (pos.y - y_center_) / width_m_;
    const RawVelocity rv = raw_jet_velocity(theta, y_hat, a_hat_, k_hat_);
    return {scale_ * rv.u, scale_ * rv.v, 0.0};
}

void advance(std::span<DrifterState> drifters, double now_s, double dt_s,
             const MeanderingField& field) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("advance: dt_s must be > 0");
    for (DrifterState& d : drifters) {
        const Vec3 v = field.velocity_at(d.pos, now_s);
        d.vel = v;
        d.pos.x = reflect_into(d.pos.x + v.x * dt_s, field.region_side());
        d.pos.y = reflect_into(d.pos.y + v.y * dt_s, field.region_side());
        d.pos.z = reflect_into(d.pos.z + v.z * dt_s, field.region_depth());
    }
}

}  // namespace eela
