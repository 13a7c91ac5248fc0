#pragma once

#include <span>

#include "eela/acoustics.hpp"
#include "eela/geometry.hpp"

namespace eela {

// One ranged anchor beacon as seen by a sensor: the anchor's self-reported
// surface position at transmit time and the one-way ToA distance estimate.
struct RangeObservation {
    int anchor_id = -1;
    Position3D anchor_position;  // z = 0
    double distance_m = 0.0;
    double observed_at_s = 0.0;
};

// One-way time-of-arrival range, valid under global time synchronization.
// Throws std::invalid_argument on non-positive flight time.
double toa_distance(double tx_time_s, double rx_time_s, const ChannelParams& chan);

enum class TrilaterationFailure {
    none,
    too_few_observations,
    degenerate_geometry,  // collinear or near-collinear anchors
    infeasible_ranges,    // every range shorter than the known depth
};

struct TrilaterationOutcome {
    bool ok = false;
    Position3D position;
    TrilaterationFailure failure = TrilaterationFailure::none;
};

// Depth-aware trilateration: each 3D range is projected onto the surface
// plane via r' = sqrt(max(d^2 - depth^2, 0)), then the 2D position is solved
// from pairwise circle differences in the least-squares sense. Needs at least
// three observations from distinct anchors.
TrilaterationOutcome trilaterate(std::span<const RangeObservation> observations,
                                 double known_depth_m);

// 3D euclidean distance between the true and estimated positions.
double localization_error(const Position3D& true_pos, const Position3D& estimate);

}  // namespace eela
