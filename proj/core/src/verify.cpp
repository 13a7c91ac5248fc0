#include "eela/verify.hpp"

#include <algorithm>
#include <cmath>

#include "eela/geometry.hpp"
#include "eela/protocol.hpp"
#include "eela/scenario.hpp"

namespace eela {

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

ChannelParams draw_channel(Rng& rng, double region_side, double p_max) {
    ChannelParams chan;
    chan.frequency_khz = rng.uniform(10.0, 30.0);
    const double diag = std::sqrt(3.0) * region_side;
    chan.r_upper_m = 2.0 * diag;
    chan.p0_watts = 1.0;
    chan.p0_watts = p_max / std::pow(10.0, attenuation_db(diag, chan) / 10.0);
    return chan;
}

GameParams draw_game(Rng& rng, double region_side, double p_max) {
    GameParams gp;
    gp.region_side_m = region_side;
    gp.n_sensors = 10 + static_cast<int>(rng.uniform() * 51);
    gp.w1_anchor = rng.uniform(0.3, 0.7);
    gp.w2_anchor = 1.0 - gp.w1_anchor;
    gp.w1_sensor = rng.uniform(0.05, 0.4);
    gp.w2_sensor = 1.0 - gp.w1_sensor;
    gp.cost_per_unit_power_anchor = log_uniform(rng, 100.0, 3000.0);
    gp.cost_per_unit_power_sensor = log_uniform(rng, 300.0, 8000.0);
    gp.total_energy_anchor = log_uniform(rng, 300.0, 3000.0);
    gp.total_energy_sensor = log_uniform(rng, 300.0, 3000.0);
    gp.p_max_watts = p_max;
    gp.q_max_watts = p_max;
    return gp;
}

// Interior-and-feasible filter: the dense-grid argmax must sit strictly inside
// the power interval and the closed-form denominator must be positive there.
template <typename Utility, typename Step>
bool accepted_interior(const Utility& u, const Step& step, double lo, double hi) {
    const GridMax gm = grid_argmax(u, lo, hi, 2048);
    const double margin = (hi - lo) / 2047.0;
    if (gm.x <= lo + margin || gm.x >= hi - margin) return false;
    if (!step(gm.x)) return false;
    if (std::abs(gm.value) < 1e-3) return false;  // keep relative tolerances meaningful
    return true;
}

}  // namespace

std::optional<FollowerInstance> draw_follower_instance(Rng& rng) {
    const double region_side = rng.uniform(1500.0, 3000.0);
    const double p_max = log_uniform(rng, 20.0, 120.0);
    FollowerInstance inst{draw_game(rng, region_side, p_max), draw_channel(rng, region_side, p_max),
                          {}};
    const int n_arx = 1 + static_cast<int>(rng.uniform() * 6.0);
    for (int i = 0; i < n_arx; ++i) {
        inst.obs.request_powers_watts.push_back(log_uniform(rng, 0.3, 0.8 * p_max));
        inst.obs.req_counts.push_back(static_cast<int>(rng.uniform() * 4.0));
    }
    const auto u = [&](double q) { return follower_utility(q, inst.obs, inst.gp, inst.chan); };
    const auto step = [&](double q) {
        return follower_fixed_point_step(q, inst.obs, inst.gp, inst.chan);
    };
    if (!accepted_interior(u, step, power_floor(inst.chan), inst.gp.q_max_watts)) {
        return std::nullopt;
    }
    return inst;
}

std::optional<LeaderInstance> draw_leader_instance(Rng& rng) {
    const double region_side = rng.uniform(1500.0, 3000.0);
    const double p_max = log_uniform(rng, 20.0, 120.0);
    LeaderInstance inst{draw_game(rng, region_side, p_max), draw_channel(rng, region_side, p_max),
                        {}};
    const int n_srx = 1 + static_cast<int>(rng.uniform() * 6.0);
    std::vector<double> replies;
    for (int i = 0; i < n_srx; ++i) replies.push_back(log_uniform(rng, 0.3, 0.8 * p_max));
    inst.obs = density_leader_observation(std::move(replies), inst.gp, inst.chan);
    const auto u = [&](double p) { return leader_utility(p, inst.obs, inst.gp, inst.chan); };
    const auto step = [&](double p) {
        return leader_fixed_point_step(p, inst.obs, inst.gp, inst.chan);
    };
    if (!accepted_interior(u, step, power_floor(inst.chan), inst.gp.p_max_watts)) {
        return std::nullopt;
    }
    return inst;
}

JointInstance draw_joint_instance(Rng& rng, int n_anchors) {
    const double region_side = rng.uniform(1500.0, 3000.0);
    const double p_max = log_uniform(rng, 20.0, 120.0);
    JointInstance inst{draw_game(rng, region_side, p_max), draw_channel(rng, region_side, p_max),
                       {}};
    for (int j = 0; j < n_anchors; ++j) {
        inst.req_counts.push_back(1 + static_cast<int>(rng.uniform() * 3.0));
    }
    return inst;
}

JointSolution solve_joint(const JointInstance& inst, int max_iterations) {
    JointSolution sol;
    const int m = static_cast<int>(inst.req_counts.size());
    const double floor = power_floor(inst.chan);
    sol.sensor_power = inst.gp.p_max_watts;
    sol.anchor_powers.assign(m, inst.gp.q_max_watts);

    for (int it = 0; it < max_iterations; ++it) {
        sol.leader_obs = density_leader_observation(sol.anchor_powers, inst.gp, inst.chan);
        const double p = leader_best_response(sol.leader_obs, inst.gp, inst.chan)
                             .value_or(floor);
        sol.follower_obs.clear();
        double max_shift = std::abs(p - sol.sensor_power) / std::max(p, floor);
        sol.sensor_power = p;
        for (int j = 0; j < m; ++j) {
            FollowerObservation fo;
            fo.request_powers_watts = {sol.sensor_power};
            fo.req_counts = {inst.req_counts[j]};
            const double q =
                follower_best_response(fo, inst.gp, inst.chan).value_or(floor);
            max_shift = std::max(max_shift,
                                 std::abs(q - sol.anchor_powers[j]) / std::max(q, floor));
            sol.anchor_powers[j] = q;
            sol.follower_obs.push_back(std::move(fo));
        }
        if (max_shift < 1e-10) {
            sol.converged = true;
            break;
        }
    }
    // Rebuild the leader view against the settled anchor powers.
    sol.leader_obs = density_leader_observation(sol.anchor_powers, inst.gp, inst.chan);
    return sol;
}

namespace {

bool check(std::ostream& out, const char* what, bool ok) {
    out << (ok ? "ok:   " : "FAIL: ") << what << "\n";
    return ok;
}

}  // namespace

bool run_verification(std::ostream& out, const VerifyOptions& options) {
    bool all_ok = true;
    Rng rng(options.seed);

    {
        ChannelParams chan;
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < options.roundtrip_points; ++i) {
            const double r = 1.0 + (5000.0 - 1.0) * i / (options.roundtrip_points - 1);
            const double back = range_for_power(power_for_range(r, chan), chan);
            worst = std::max(worst, std::abs(back - r) / r);
        }
        ok = worst < 1e-6;
        all_ok &= check(out, "power<->range round trip below 1e-6 relative", ok);
    }

    {
        bool ok = true;
        int done = 0, attempts = 0;
        while (done < options.br_draws && attempts < options.br_draws * 400) {
            ++attempts;
            const auto inst = draw_follower_instance(rng);
            if (!inst) continue;
            ++done;
            const double br =
                follower_best_response(inst->obs, inst->gp, inst->chan).value_or(0.0);
            const auto u = [&](double q) {
                return follower_utility(q, inst->obs, inst->gp, inst->chan);
            };
            const GridMax gm = grid_argmax(u, power_floor(inst->chan), inst->gp.q_max_watts,
                                           10000);
            if (!(u(br) >= gm.value - 1e-6 * std::abs(gm.value))) ok = false;
        }
        ok = ok && done == options.br_draws;
        all_ok &= check(out, "anchor best response matches dense grid argmax", ok);
    }

    {
        bool ok = true;
        int done = 0, attempts = 0;
        while (done < options.br_draws && attempts < options.br_draws * 400) {
            ++attempts;
            const auto inst = draw_leader_instance(rng);
            if (!inst) continue;
            ++done;
            const double br =
                leader_best_response(inst->obs, inst->gp, inst->chan).value_or(0.0);
            const auto u = [&](double p) {
                return leader_utility(p, inst->obs, inst->gp, inst->chan);
            };
            const GridMax gm = grid_argmax(u, power_floor(inst->chan), inst->gp.p_max_watts,
                                           10000);
            if (!(u(br) >= gm.value - 1e-6 * std::abs(gm.value))) ok = false;
        }
        ok = ok && done == options.br_draws;
        all_ok &= check(out, "sensor best response matches dense grid argmax", ok);
    }

    {
        bool ok = true;
        for (int i = 0; i < options.equilibrium_instances; ++i) {
            const int m = 2 + static_cast<int>(rng.uniform() * 3.0);
            const JointInstance inst = draw_joint_instance(rng, m);
            const JointSolution sol = solve_joint(inst);
            if (!sol.converged ||
                !verify_equilibrium(sol.sensor_power, sol.anchor_powers, sol.leader_obs,
                                    sol.follower_obs, inst.gp, inst.chan, 1e-5)) {
                ok = false;
            }
        }
        all_ok &= check(out, "joint best responses form an equilibrium (1e-5 deviation scan)",
                        ok);
    }

    {
        ChannelParams chan;
        bool ok = true;
        for (int i = 0; i < options.twohop_triangles; ++i) {
            const Position3D sensor{rng.uniform(0.0, 2500.0), rng.uniform(0.0, 2500.0),
                                    rng.uniform(0.0, 2500.0)};
            const Position3D a1{rng.uniform(0.0, 2500.0), rng.uniform(0.0, 2500.0), 0.0};
            const Position3D a2{rng.uniform(0.0, 2500.0), rng.uniform(0.0, 2500.0), 0.0};
            NeighborEntry one{1, HopClass::one_hop, a1, 1.0, 0.0, distance(sensor, a1),
                              std::nullopt};
            NeighborEntry two{2, HopClass::two_hop, a2, 1.0, 0.0, 0.0, 1};
            const double p = two_hop_power(one, two, chan, TwoHopRule::range);
            const double reach = range_for_power(p, chan);
            if (reach < distance(sensor, a2) * (1.0 - 1e-9) - 1e-9) ok = false;
        }
        all_ok &= check(out, "two-hop escalation power always covers the far anchor", ok);
    }

    out << (all_ok ? "verification passed\n" : "verification FAILED\n");
    return all_ok;
}

}  // namespace eela
