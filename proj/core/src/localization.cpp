#include "eela/localization.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace eela {

double toa_distance(double tx_time_s, double rx_time_s, const ChannelParams& chan) {
    if (!(rx_time_s > tx_time_s)) {
        throw std::invalid_argument("toa_distance: non-positive flight time");
    }
    return (rx_time_s - tx_time_s) * chan.sound_speed_mps;
}

TrilaterationOutcome trilaterate(std::span<const RangeObservation> observations,
                                 double known_depth_m) {
    if (known_depth_m < 0.0) throw std::invalid_argument("trilaterate: negative depth");

    std::set<int> ids;
    for (const RangeObservation& o : observations) ids.insert(o.anchor_id);
    if (ids.size() < 3) return {false, {}, TrilaterationFailure::too_few_observations};

    // Project ranges onto the surface plane. A single short range is clamped
    // to zero (measurement noise); all ranges short means the depth itself
    // contradicts every observation.
    std::vector<double> rho2(observations.size());
    bool any_feasible = false;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const double d = observations[i].distance_m;
        const double proj = d * d - known_depth_m * known_depth_m;
        rho2[i] = std::max(proj, 0.0);
        if (d >= known_depth_m) any_feasible = true;
    }
    if (!any_feasible) return {false, {}, TrilaterationFailure::infeasible_ranges};

    const double x0 = observations[0].anchor_position.x;
    const double y0 = observations[0].anchor_position.y;
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 1; i < observations.size(); ++i) {
        const double xi = observations[i].anchor_position.x;
        const double yi = observations[i].anchor_position.y;
        const double ax = 2.0 * (xi - x0);
        const double ay = 2.0 * (yi - y0);
        const double rhs = (xi * xi - x0 * x0) + (yi * yi - y0 * y0) + rho2[0] - rho2[i];
        a11 += ax * ax;
        a12 += ax * ay;
        a22 += ay * ay;
        b1 += ax * rhs;
        b2 += ay * rhs;
    }

    // Condition of the 2x2 normal matrix decides degeneracy.
    const double tr = a11 + a22;
    const double disc = std::sqrt((a11 - a22) * (a11 - a22) + 4.0 * a12 * a12);
    const double lambda_max = 0.5 * (tr + disc);
    const double lambda_min = 0.5 * (tr - disc);
    if (!(lambda_min > 0.0) || lambda_max / lambda_min > 1e8) {
        return {false, {}, TrilaterationFailure::degenerate_geometry};
    }

    const double det = a11 * a22 - a12 * a12;
    const double x = (a22 * b1 - a12 * b2) / det;
    const double y = (a11 * b2 - a12 * b1) / det;
    return {true, {x, y, known_depth_m}, TrilaterationFailure::none};
}

double localization_error(const Position3D& true_pos, const Position3D& estimate) {
    return distance(true_pos, estimate);
}

}  // namespace eela
