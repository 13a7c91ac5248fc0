// Acceptance suite: every release criterion with its tolerance pinned in
// code. Prints one PASS/FAIL line per criterion; the exit status is the
// number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eela/engine.hpp"
#include "eela/experiment.hpp"
#include "eela/localization.hpp"
#include "eela/protocol.hpp"
#include "eela/rng.hpp"
#include "eela/scenario.hpp"
#include "eela/verify.hpp"

using namespace eela;

namespace {

int g_failures = 0;

void report(int index, bool ok, const std::string& what, double seconds) {
    std::printf("[%2d] %s %s (%.1f s)\n", index, ok ? "PASS" : "FAIL", what.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

template <typename Fn>
void criterion(int index, const std::string& what, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = fn();
    } catch (const std::exception& e) {
        std::printf("     exception: %s\n", e.what());
        ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(index, ok, what, secs);
}

Scenario acceptance_scenario() {
    Scenario sc;
    sc.replications = 100;
    sc.current_speed_mps = 2.0;
    sc.seed = 1;
    sc.finalize();
    return sc;
}

struct PolicyMeans {
    double coverage = 0.0;
    double e_sensor = 0.0;
    double e_anchor = 0.0;
    double e_node = 0.0;
    int points = 0;
};

// Aggregates the sensors sweep (10..50 x 4 policies x replications) into one
// mean per policy and metric.
std::map<Policy, PolicyMeans> sweep_aggregate(const std::vector<SweepRow>& rows) {
    std::map<Policy, PolicyMeans> by_policy;
    for (const SweepRow& row : rows) {
        PolicyMeans& m = by_policy[row.policy];
        m.coverage += row.report.coverage.mean;
        m.e_sensor += row.report.e_sensor.mean;
        m.e_anchor += row.report.e_anchor.mean;
        m.e_node += row.report.e_node.mean;
        ++m.points;
    }
    for (auto& [policy, m] : by_policy) {
        m.coverage /= m.points;
        m.e_sensor /= m.points;
        m.e_anchor /= m.points;
        m.e_node /= m.points;
    }
    return by_policy;
}

bool run_cli(const std::string& cmd) { return std::system(cmd.c_str()) == 0; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main() {
    // 1: propagation formulas and the power<->range inverse.
    criterion(1, "propagation: absorption value and round-trip inverse", [] {
        bool ok = std::abs(absorption_db_per_km(22.0) - 4.8916) <= 1e-3;
        ChannelParams chan;
        for (int i = 0; i <= 2000 && ok; ++i) {
            const double r = 1.0 + (5000.0 - 1.0) * i / 2000.0;
            const double back = range_for_power(power_for_range(r, chan), chan);
            ok = std::abs(back - r) / r < 1e-6;
        }
        return ok;
    });

    // 2: best responses against a 10^4-point grid argmax on feasible draws.
    criterion(2, "best responses match dense grid argmax on 200 draws per side", [] {
        Rng rng(20240607);
        int done = 0, attempts = 0;
        bool ok = true;
        while (done < 200 && attempts < 200 * 500) {
            ++attempts;
            const auto inst = draw_follower_instance(rng);
            if (!inst) continue;
            ++done;
            const double br = follower_best_response(inst->obs, inst->gp, inst->chan).value();
            const auto u = [&](double q) {
                return follower_utility(q, inst->obs, inst->gp, inst->chan);
            };
            const GridMax gm =
                grid_argmax(u, power_floor(inst->chan), inst->gp.q_max_watts, 10000);
            if (!(u(br) >= gm.value - 1e-6 * std::abs(gm.value))) ok = false;
        }
        ok = ok && done == 200;
        done = 0;
        attempts = 0;
        while (done < 200 && attempts < 200 * 500) {
            ++attempts;
            const auto inst = draw_leader_instance(rng);
            if (!inst) continue;
            ++done;
            const double br = leader_best_response(inst->obs, inst->gp, inst->chan).value();
            const auto u = [&](double p) {
                return leader_utility(p, inst->obs, inst->gp, inst->chan);
            };
            const GridMax gm =
                grid_argmax(u, power_floor(inst->chan), inst->gp.p_max_watts, 10000);
            if (!(u(br) >= gm.value - 1e-6 * std::abs(gm.value))) ok = false;
        }
        return ok && done == 200;
    });

    // 3: alternating best responses settle into a no-deviation profile.
    criterion(3, "equilibrium deviation scan on 50 joint instances", [] {
        Rng rng(987654321);
        for (int i = 0; i < 50; ++i) {
            const int anchors = 2 + static_cast<int>(rng.uniform() * 3);
            const JointInstance inst = draw_joint_instance(rng, anchors);
            const JointSolution sol = solve_joint(inst);
            if (!sol.converged) return false;
            if (!verify_equilibrium(sol.sensor_power, sol.anchor_powers, sol.leader_obs,
                                    sol.follower_obs, inst.gp, inst.chan, 1e-5)) {
                return false;
            }
        }
        return true;
    });

    // 4: concavity of both utilities on feasible grids; monotone counts.
    criterion(4, "concavity and monotonicity on feasible grids", [] {
        Rng rng(13579);
        int done = 0, attempts = 0;
        while (done < 25 && attempts < 25 * 500) {
            ++attempts;
            const auto inst = draw_follower_instance(rng);
            if (!inst) continue;
            ++done;
            const double lo = power_floor(inst->chan);
            const double hi = inst->gp.q_max_watts;
            const int n = 200;
            const double step = (hi - lo) / (n - 1);
            for (int i = 1; i + 1 < n; ++i) {
                const double q = lo + i * step;
                if (!follower_fixed_point_step(q, inst->obs, inst->gp, inst->chan)) continue;
                const auto u = [&](double x) {
                    return follower_utility(x, inst->obs, inst->gp, inst->chan);
                };
                if (u(q - step) - 2.0 * u(q) + u(q + step) >
                    1e-9 * (1.0 + std::abs(u(q)))) {
                    return false;
                }
            }
        }
        if (done < 25) return false;
        done = 0;
        attempts = 0;
        while (done < 25 && attempts < 25 * 500) {
            ++attempts;
            const auto inst = draw_leader_instance(rng);
            if (!inst) continue;
            ++done;
            const double lo = power_floor(inst->chan);
            const double hi = inst->gp.p_max_watts;
            const int n = 200;
            const double step = (hi - lo) / (n - 1);
            for (int i = 1; i + 1 < n; ++i) {
                const double p = lo + i * step;
                if (!leader_fixed_point_step(p, inst->obs, inst->gp, inst->chan)) continue;
                const auto u = [&](double x) {
                    return leader_utility(x, inst->obs, inst->gp, inst->chan);
                };
                if (u(p - step) - 2.0 * u(p) + u(p + step) >
                    1e-9 * (1.0 + std::abs(u(p)))) {
                    return false;
                }
            }
        }
        if (done < 25) return false;

        // Monotonicity: handled_requests and power_for_range never decrease.
        GameParams gp;
        ChannelParams chan;
        double prev_n = -1.0, prev_p = -1.0;
        for (int i = 0; i < 1000; ++i) {
            const double q = power_floor(chan) + (gp.q_max_watts - power_floor(chan)) * i / 999.0;
            const double nh = handled_requests(q, gp, chan);
            if (nh < prev_n) return false;
            prev_n = nh;
            const double r = 1.0 + 5999.0 * i / 999.0;
            const double p = power_for_range(r, chan);
            if (p < prev_p) return false;
            prev_p = p;
        }
        return true;
    });

    // 5-8 share one sensors sweep at 100 replications.
    Scenario base = acceptance_scenario();
    std::map<Policy, PolicyMeans> agg;
    criterion(5, "coverage ordering Max >= EELA >= OLTC >= Min with the stated gaps", [&] {
        const std::vector<SweepRow> rows = sweep(base, SweepAxis::sensors);
        agg = sweep_aggregate(rows);
        const PolicyMeans& eela = agg[Policy::eela];
        const PolicyMeans& oltc = agg[Policy::oltc];
        const PolicyMeans& emin = agg[Policy::eela_min];
        const PolicyMeans& emax = agg[Policy::eela_max];
        std::printf("     coverage: Max %.4f, EELA %.4f, OLTC %.4f, Min %.4f\n",
                    emax.coverage, eela.coverage, oltc.coverage, emin.coverage);
        return emax.coverage >= eela.coverage && eela.coverage >= oltc.coverage &&
               oltc.coverage >= emin.coverage && (eela.coverage - oltc.coverage) >= 0.0 &&
               (eela.coverage - emin.coverage) >= 0.25;
    });

    criterion(6, "per-sensor energy: EELA <= 0.7 x OLTC", [&] {
        if (agg.empty()) return false;
        std::printf("     e_sensor: EELA %.2f J, OLTC %.2f J (ratio %.2f)\n",
                    agg[Policy::eela].e_sensor, agg[Policy::oltc].e_sensor,
                    agg[Policy::eela].e_sensor / agg[Policy::oltc].e_sensor);
        return agg[Policy::eela].e_sensor <= 0.7 * agg[Policy::oltc].e_sensor;
    });

    criterion(7, "per-node energy: EELA <= 0.7 x OLTC", [&] {
        if (agg.empty()) return false;
        std::printf("     e_node: EELA %.2f J, OLTC %.2f J (ratio %.2f)\n",
                    agg[Policy::eela].e_node, agg[Policy::oltc].e_node,
                    agg[Policy::eela].e_node / agg[Policy::oltc].e_node);
        return agg[Policy::eela].e_node <= 0.7 * agg[Policy::oltc].e_node;
    });

    criterion(8, "per-anchor energy: EELA above OLTC", [&] {
        if (agg.empty()) return false;
        std::printf("     e_anchor: EELA %.2f J, OLTC %.2f J\n", agg[Policy::eela].e_anchor,
                    agg[Policy::oltc].e_anchor);
        return agg[Policy::eela].e_anchor > agg[Policy::oltc].e_anchor;
    });

    // 9: localization error grows with the current speed.
    criterion(9, "ALE monotone in current speed with ALE(4)/ALE(2) >= 1.5", [] {
        Scenario sc = acceptance_scenario();
        std::vector<double> ale;
        for (double v : {2.0, 3.0, 4.0}) {
            Scenario point = sc;
            point.current_speed_mps = v;
            point.finalize();
            const MetricsReport rep = run_experiment(point);
            if (rep.ale_m.count == 0) return false;
            ale.push_back(rep.ale_m.mean);
        }
        std::printf("     ALE: %.2f m @2, %.2f m @3, %.2f m @4 (ratio %.2f)\n", ale[0],
                    ale[1], ale[2], ale[2] / ale[0]);
        return ale[0] < ale[1] && ale[1] < ale[2] && ale[2] / ale[0] >= 1.5;
    });

    // 10: trilateration exactness and degeneracy detection.
    criterion(10, "trilateration: exact on 1000 zero-motion geometries, rejects collinear", [] {
        Rng rng(424242);
        int done = 0;
        while (done < 1000) {
            const Position3D sensor{rng.uniform(100.0, 2400.0), rng.uniform(100.0, 2400.0),
                                    rng.uniform(0.0, 2400.0)};
            std::vector<RangeObservation> obs;
            for (int a = 0; a < 4; ++a) {
                const Position3D anchor{rng.uniform(0.0, 2500.0), rng.uniform(0.0, 2500.0),
                                        0.0};
                obs.push_back({a, anchor, distance(sensor, anchor), 0.0});
            }
            const TrilaterationOutcome out = trilaterate(obs, sensor.z);
            if (!out.ok) continue;
            ++done;
            if (localization_error(sensor, out.position) >= 1e-6) return false;
        }
        std::vector<RangeObservation> collinear = {{0, {0.0, 0.0, 0.0}, 500.0, 0.0},
                                                   {1, {500.0, 500.0, 0.0}, 400.0, 0.0},
                                                   {2, {1000.0, 1000.0, 0.0}, 600.0, 0.0}};
        return trilaterate(collinear, 100.0).failure ==
               TrilaterationFailure::degenerate_geometry;
    });

    // 11: two CLI invocations with the same config produce identical bytes.
    criterion(11, "simulate is byte-deterministic across invocations", [] {
        Scenario sc;
        sc.n_sensors = 12;
        sc.replications = 3;
        sc.seed = 21;
        sc.finalize();
        const std::string dir = "acceptance_tmp";
        run_cli("mkdir -p " + dir);
        {
            std::ofstream cfg(dir + "/determinism.cfg");
            cfg << scenario_to_config_text(sc);
        }
        const std::string cli = ACCEPTANCE_CLI_PATH;
        for (int i = 1; i <= 2; ++i) {
            const std::string tag = dir + "/run" + std::to_string(i);
            if (!run_cli(cli + " simulate --config " + dir + "/determinism.cfg --out " + tag +
                         ".csv --trace " + tag + ".tsv 2> /dev/null")) {
                return false;
            }
        }
        const std::string csv1 = slurp(dir + "/run1.csv");
        const std::string csv2 = slurp(dir + "/run2.csv");
        const std::string tsv1 = slurp(dir + "/run1.tsv");
        const std::string tsv2 = slurp(dir + "/run2.tsv");
        return !csv1.empty() && !tsv1.empty() && csv1 == csv2 && tsv1 == tsv2;
    });

    // 12: two-hop escalation reaches the far anchor under the range rule.
    criterion(12, "two-hop power covers the true distance on 1000 triangles", [] {
        ChannelParams chan;
        chan.p0_watts = 1.6e-6;
        Rng rng(5150);
        for (int i = 0; i < 1000; ++i) {
            const Position3D sensor{rng.uniform(0.0, 2500.0), rng.uniform(0.0, 2500.0),
                                    rng.uniform(0.0, 2500.0)};
            const Position3D a1{rng.uniform(0.0, 2500.0), rng.uniform(0.0, 2500.0), 0.0};
            const Position3D a2{rng.uniform(0.0, 2500.0), rng.uniform(0.0, 2500.0), 0.0};
            const NeighborEntry one{1, HopClass::one_hop, a1, 1.0, 0.0,
                                    distance(sensor, a1), std::nullopt};
            const NeighborEntry two{2, HopClass::two_hop, a2, 1.0, 0.0, 0.0, 1};
            const double p = two_hop_power(one, two, chan, TwoHopRule::range);
            if (range_for_power(p, chan) < distance(sensor, a2) * (1.0 - 1e-9) - 1e-9) {
                return false;
            }
        }
        return true;
    });

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
    } else {
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
