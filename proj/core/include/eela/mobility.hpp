#pragma once

#include <cstdint>
#include <span>

#include "eela/geometry.hpp"

namespace eela {

// Meandering sub-surface jet parameters. peak_speed_mps is the core speed of
// the jet; the pattern translates along x at phase_speed_mps. The seed shifts
// the meander phase so replications see different flow snapshots.
struct CurrentField {
    double peak_speed_mps = 2.0;
    double meander_wavelength_m = 2500.0;
    double meander_amplitude_m = 400.0;
    double phase_speed_mps = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

// Divergence-free horizontal flow from the meandering-jet stream function
//   psi(x,y,t) = -tanh[(y - A sin(k (x - c t))) / sqrt(1 + A^2 k^2 cos^2(...))]
// evaluated in units of the jet half-width (wavelength/2) and scaled so the
// maximum speed over the field equals peak_speed_mps. The vertical component
// is zero everywhere. A zero amplitude degenerates to uniform flow along +x
// at the peak speed.
class MeanderingField {
public:
    MeanderingField(const CurrentField& cfg, double region_side_m, double region_depth_m);

    Vec3 velocity_at(const Position3D& pos, double time_s) const;

    const CurrentField& config() const { return cfg_; }
    double region_side() const { return side_; }
    double region_depth() const { return depth_; }

private:
    CurrentField cfg_;
    double side_;
    double depth_;
    double width_m_;    // jet half-width
    double k_hat_;      // wavenumber nondimensionalized by the width
    double a_hat_;      // amplitude in width units
    double y_center_;
    double x_offset_;   // seed-derived meander phase
    double scale_;      // peak_speed / max raw speed
};

struct DrifterState {
    Position3D pos;
    Vec3 vel;  // velocity applied in the most recent step, for interpolation
};

// One forward-Euler step for every drifter; positions are reflected back into
// the region box [0,side] x [0,side] x [0,depth].
void advance(std::span<DrifterState> drifters, double now_s, double dt_s,
             const MeanderingField& field);

}  // namespace eela
