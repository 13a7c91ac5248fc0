#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "eela/game.hpp"
#include "eela/rng.hpp"

namespace eela {

// Randomized solver instances drawn in the regime where the closed-form
// denominator stays positive at the optimum and the optimum is interior.
// Callers loop until a draw is accepted.
struct FollowerInstance {
    GameParams gp;
    ChannelParams chan;
    FollowerObservation obs;
};

struct LeaderInstance {
    GameParams gp;
    ChannelParams chan;
    LeaderObservation obs;
};

std::optional<FollowerInstance> draw_follower_instance(Rng& rng);
std::optional<LeaderInstance> draw_leader_instance(Rng& rng);

// Leader-follower instance with one sensor and a handful of anchors, solved
// by alternating best responses until the joint power profile settles.
struct JointInstance {
    GameParams gp;
    ChannelParams chan;
    std::vector<int> req_counts;  // one per anchor
};

struct JointSolution {
    bool converged = false;
    double sensor_power = 0.0;
    std::vector<double> anchor_powers;
    LeaderObservation leader_obs;
    std::vector<FollowerObservation> follower_obs;
};

JointInstance draw_joint_instance(Rng& rng, int n_anchors);
JointSolution solve_joint(const JointInstance& inst, int max_iterations = 200);

struct VerifyOptions {
    int br_draws = 50;
    int equilibrium_instances = 10;
    int roundtrip_points = 400;
    int twohop_triangles = 300;
    std::uint64_t seed = 20240601;
};

// Property suite behind the `verify` CLI subcommand: best responses against a
// dense grid argmax, equilibrium deviation scans, power<->range round trips
// and two-hop reachability. Prints one line per section, returns overall ok.
bool run_verification(std::ostream& out, const VerifyOptions& options = {});

}  // namespace eela
