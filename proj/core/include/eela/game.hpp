#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "eela/acoustics.hpp"

namespace eela {

// Weights and scaling constants of the leader-follower power game. The cost
// constants C (anchor) and E (sensor) are utility-side valuations in J/W per
// transmission; the physical energy ledger is accounted separately by the
// engine.
struct GameParams {
    double w1_anchor = 0.4;
    double w2_anchor = 0.6;
    double w1_sensor = 0.1;
    double w2_sensor = 0.9;
    double cost_per_unit_power_anchor = 150.0;   // C_j
    double cost_per_unit_power_sensor = 4000.0;  // E_i
    double total_energy_anchor = 1000.0;         // joules
    double total_energy_sensor = 1000.0;
    int n_sensors = 50;
    double region_side_m = 2500.0;
    int n_min_req = 3;
    double p_max_watts = 60.0;
    double q_max_watts = 60.0;

    void validate() const;  // throws std::invalid_argument
};

// What an anchor observed during one request-collection window.
struct FollowerObservation {
    std::vector<double> request_powers_watts;  // P_1..P_{n_arx}
    std::vector<int> req_counts;               // n_k^req per request

    int n_arx() const { return static_cast<int>(request_powers_watts.size()); }
    double sum_power() const;
    int sum_req() const;
};

// What a sensor knows when choosing its request power: the transmit powers
// overheard from anchor beacons and a monotone map from own power to the
// number of reachable anchors.
struct LeaderObservation {
    std::vector<double> reply_powers_watts;  // Q_1..Q_{n_srx}
    std::function<double(double)> neighbor_count;             // n_neig(P), non-decreasing
    std::function<double(double)> neighbor_count_derivative;  // optional; empty treated as 0

    int n_srx() const { return static_cast<int>(reply_powers_watts.size()); }
    double sum_power() const;
};

// max(n_min_req - visible, 0): how many more anchors a sensor still needs.
int required_anchors(int n_min_req, int visible);

// Expected number of requests an anchor can serve at power q under uniform
// sensor density: min(4*pi*n*R(q)^3 / (3*d^3), n). Real-valued so the
// utilities stay smooth; integer counts live in protocol bookkeeping.
double handled_requests(double q_watts, const GameParams& gp, const ChannelParams& chan);

// d(handled_requests)/dq; zero above the density cap.
double handled_requests_slope(double q_watts, const GameParams& gp, const ChannelParams& chan);

// Density-model neighbor map for a sensor (same volume argument as
// handled_requests). Used where a smooth n_neig is wanted, e.g. equilibrium
// studies; the protocol substitutes the step function from its actual lists.
LeaderObservation density_leader_observation(std::vector<double> reply_powers,
                                             const GameParams& gp, const ChannelParams& chan);

double follower_utility(double q_watts, const FollowerObservation& obs, const GameParams& gp,
                        const ChannelParams& chan);
double leader_utility(double p_watts, const LeaderObservation& obs, const GameParams& gp,
                      const ChannelParams& chan);

// One evaluation of the closed-form best-response map
//   Q <- sqrt(w2 * E^tl * sum(P) / (w1*C - w2*E^tl*coef*n_hd'(Q))).
// Returns nullopt when the positivity condition on the denominator fails.
std::optional<double> follower_fixed_point_step(double q_watts, const FollowerObservation& obs,
                                                const GameParams& gp, const ChannelParams& chan);
std::optional<double> leader_fixed_point_step(double p_watts, const LeaderObservation& obs,
                                              const GameParams& gp, const ChannelParams& chan);

// Utility-maximizing power on [power floor, max]. Damped fixed-point iteration
// on the closed form, falling back to a 1024-point grid argmax with
// golden-section refinement when the feasibility condition fails, the
// iteration diverges, or the fixed point is not the argmax. Returns nullopt on
// an empty observation (no requests / no beacons heard).
std::optional<double> follower_best_response(const FollowerObservation& obs, const GameParams& gp,
                                             const ChannelParams& chan,
                                             int* fallback_count = nullptr);
std::optional<double> leader_best_response(const LeaderObservation& obs, const GameParams& gp,
                                           const ChannelParams& chan,
                                           int* fallback_count = nullptr);

// True iff no single player can improve its own utility by more than
// epsilon * |U| by switching to any power on a 1024-point grid, holding the
// other players' powers (inside the observations) fixed.
bool verify_equilibrium(double sensor_power, std::span<const double> anchor_powers,
                        const LeaderObservation& leader_obs,
                        std::span<const FollowerObservation> follower_obs, const GameParams& gp,
                        const ChannelParams& chan, double epsilon);

// Grid argmax helper shared by the solvers and the oracle tests: scans n
// points on [lo, hi], then refines around the best cell by golden section.
// Ties prefer the lowest power.
struct GridMax {
    double x = 0.0;
    double value = 0.0;
};
GridMax grid_argmax(const std::function<double(double)>& f, double lo, double hi, int n_points);

}  // namespace eela
