#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eela/engine.hpp"
#include "eela/experiment.hpp"
#include "eela/rng.hpp"
#include "eela/scenario.hpp"

using namespace eela;

namespace {

struct TraceLine {
    double time;
    std::string kind;
    int node;
    int peer;
    double power;
    std::string outcome;
};

std::vector<TraceLine> parse_trace(const std::string& text) {
    std::vector<TraceLine> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("time_s", 0) == 0) continue;
        TraceLine t;
        std::istringstream ls(line);
        std::string outcome;
        ls >> t.time >> t.kind >> t.node >> t.peer >> t.power >> t.outcome;
        out.push_back(t);
    }
    return out;
}

// Small static scenario builder; motion switched off unless asked for.
Scenario small_scenario(std::vector<Position3D> positions, int n_anchors, Policy policy) {
    Scenario sc;
    sc.n_anchors = n_anchors;
    sc.n_sensors = static_cast<int>(positions.size()) - n_anchors;
    sc.policy = policy;
    sc.replications = 1;
    sc.initial_positions = std::move(positions);
    sc.finalize();
    sc.field.peak_speed_mps = 0.0;
    sc.field.meander_amplitude_m = 0.0;
    return sc;
}

}  // namespace

TEST_CASE("interval collision rule") {
    CHECK_FALSE(intervals_collide(0.0, 1.0, 2.0, 3.0));  // disjoint
    CHECK(intervals_collide(0.0, 1.0, 0.999, 2.0));      // any positive overlap
    CHECK(intervals_collide(0.0, 1.0, -0.5, 0.001));
    // Back-to-back packets with zero-length overlap both survive.
    CHECK_FALSE(intervals_collide(0.0, 1.0, 1.0, 2.0));
    CHECK_FALSE(intervals_collide(1.0, 2.0, 0.0, 1.0));
}

TEST_CASE("broadcast delivers at distance over sound speed") {
    // One beaconing anchor, two listening sensors at 750 m and 1500 m.
    Scenario sc = small_scenario({{0.0, 0.0, 0.0}, {750.0, 0.0, 0.0}, {1500.0, 0.0, 0.0}}, 1,
                                 Policy::eela_min);
    sc.r_min_policy_m = 2000.0;
    sc.timing.wakeup_jitter_s = 0.0;
    sc.horizon_s = 3.0;
    sc.finalize();
    sc.field.peak_speed_mps = 0.0;
    sc.field.meander_amplitude_m = 0.0;

    std::ostringstream trace;
    simulate_run(sc, 1, &trace);
    const auto lines = parse_trace(trace.str());
    std::vector<double> arrivals;
    for (const auto& l : lines) {
        if (l.kind == "rx:wakeup" && l.outcome == "delivered") arrivals.push_back(l.time);
    }
    REQUIRE(arrivals.size() == 2);
    CHECK(arrivals[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(arrivals[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("overlapping packets collide at the receiver") {
    // Two anchors fire at t = 0; their beacons overlap at the sensor.
    Scenario sc = small_scenario(
        {{0.0, 0.0, 0.0}, {0.0, 100.0, 0.0}, {750.0, 0.0, 0.0}}, 2, Policy::eela_min);
    sc.r_min_policy_m = 2000.0;
    sc.timing.wakeup_jitter_s = 0.0;
    sc.horizon_s = 3.0;
    sc.finalize();
    sc.field.peak_speed_mps = 0.0;
    sc.field.meander_amplitude_m = 0.0;

    std::ostringstream trace;
    const RunResult res = simulate_run(sc, 1, &trace);
    int collided_at_sensor = 0;
    for (const auto& l : parse_trace(trace.str())) {
        if (l.kind == "rx:wakeup" && l.node == 2 && l.outcome == "collided") {
            ++collided_at_sensor;
        }
    }
    CHECK(collided_at_sensor == 2);
    CHECK(res.collided >= 2);
}

TEST_CASE("a node transmitting during an arrival loses that arrival") {
    // Two sensors near one far anchor; both request at the same instant and
    // jam each other's reception while their own radios are busy.
    Scenario sc = small_scenario(
        {{2400.0, 2400.0, 0.0}, {100.0, 0.0, 0.0}, {200.0, 0.0, 0.0}}, 1, Policy::eela_max);
    sc.timing.request_jitter_s = 0.0;
    sc.horizon_s = 30.0;
    sc.finalize();
    sc.field.peak_speed_mps = 0.0;
    sc.field.meander_amplitude_m = 0.0;

    std::ostringstream trace;
    const RunResult res = simulate_run(sc, 1, &trace);
    int busy = 0;
    for (const auto& l : parse_trace(trace.str())) {
        if (l.kind == "rx:request" && l.outcome == "busy") ++busy;
    }
    CHECK(busy >= 2);
    CHECK(res.dropped_busy >= 2);
}

TEST_CASE("hand-traceable fix: one sensor, three close anchors, EELA-Max") {
    Scenario sc = small_scenario({{1000.0, 1000.0, 0.0},
                                  {1500.0, 1000.0, 0.0},
                                  {1000.0, 1600.0, 0.0},
                                  {1250.0, 1250.0, 400.0}},
                                 3, Policy::eela_max);
    sc.horizon_s = 120.0;
    sc.finalize();
    sc.field.peak_speed_mps = 0.0;
    sc.field.meander_amplitude_m = 0.0;

    const RunResult res = simulate_run(sc, 7, nullptr);
    REQUIRE(res.sensors.size() == 1);
    const SensorOutcome& s = res.sensors[0];
    REQUIRE(s.localized);
    // Static geometry and exact ToA make the fix exact.
    CHECK(s.error_m < 1e-6);
    CHECK(s.first_request_s >= sc.timing.phase3_start_s);
    CHECK(s.localized_at_s > s.first_request_s);
}

TEST_CASE("a 20-byte request at 1 W costs 0.32 J of transmit energy") {
    Scenario sc = small_scenario({{0.0, 0.0, 0.0},
                                  {100.0, 0.0, 0.0},
                                  {0.0, 100.0, 0.0},
                                  {2400.0, 2400.0, 2400.0}},
                                 3, Policy::eela_min);
    sc.horizon_s = 30.0;  // one request round, no retry
    sc.finalize();
    sc.r_min_policy_m = range_for_power(1.0, sc.channel);
    sc.finalize();
    sc.field.peak_speed_mps = 0.0;
    sc.field.meander_amplitude_m = 0.0;
    CHECK(sc.fixed_min_power_watts == doctest::Approx(1.0).epsilon(1e-6));

    const RunResult res = simulate_run(sc, 3, nullptr);
    const int sensor_idx = 3;
    CHECK(res.ledgers[sensor_idx].tx_joules == doctest::Approx(0.32).epsilon(1e-6));
}

TEST_CASE("powers too small to reach anyone give zero coverage") {
    Scenario sc = small_scenario({{0.0, 0.0, 0.0},
                                  {2500.0, 0.0, 0.0},
                                  {0.0, 2500.0, 0.0},
                                  {1250.0, 1250.0, 1250.0}},
                                 3, Policy::eela_min);
    sc.r_min_policy_m = 1.0;  // power floor: nobody hears anything
    sc.horizon_s = 120.0;
    sc.finalize();
    sc.field.peak_speed_mps = 0.0;
    sc.field.meander_amplitude_m = 0.0;

    const RunResult res = simulate_run(sc, 5, nullptr);
    CHECK(res.delivered == 0);
    CHECK_FALSE(res.sensors[0].localized);
}

TEST_CASE("identical scenario and seed reproduce the run bit for bit") {
    Scenario sc = load_scenario_file("configs/default.cfg");
    sc.n_sensors = 12;
    sc.replications = 1;
    sc.finalize();

    std::ostringstream t1, t2;
    const RunResult a = simulate_run(sc, 99, &t1);
    const RunResult b = simulate_run(sc, 99, &t2);
    CHECK(t1.str() == t2.str());
    REQUIRE(a.sensors.size() == b.sensors.size());
    for (std::size_t i = 0; i < a.sensors.size(); ++i) {
        CHECK(a.sensors[i].localized == b.sensors[i].localized);
        CHECK(a.sensors[i].localized_at_s == b.sensors[i].localized_at_s);
        CHECK(a.sensors[i].error_m == b.sensors[i].error_m);
    }
    for (std::size_t i = 0; i < a.ledgers.size(); ++i) {
        CHECK(a.ledgers[i].total() == b.ledgers[i].total());
    }

    std::ostringstream t3;
    const RunResult c = simulate_run(sc, 100, &t3);
    CHECK(t1.str() != t3.str());  // a different seed must actually change the run
}

TEST_CASE("the energy ledger reconciles with the transmission audit") {
    Scenario sc = load_scenario_file("configs/default.cfg");
    sc.n_sensors = 15;
    sc.replications = 1;
    sc.finalize();
    const RunResult res = simulate_run(sc, 11, nullptr);
    for (std::size_t i = 0; i < res.ledgers.size(); ++i) {
        const EnergyLedger& l = res.ledgers[i];
        double tx = 0.0;
        for (const TxAuditEntry& e : res.tx_audit[i]) tx += e.power_watts * e.duration_s;
        CHECK(l.tx_joules == doctest::Approx(tx).epsilon(1e-9));
        CHECK(l.rx_joules == doctest::Approx(sc.rx_idle_power_w * res.rx_busy_s[i]).epsilon(1e-9));
        CHECK(l.idle_joules ==
              doctest::Approx(sc.rx_idle_power_w * (res.sleep_from_s[i] - res.rx_busy_s[i]))
                  .epsilon(1e-9));
        CHECK(l.sleep_joules ==
              doctest::Approx(sc.sleep_power_w * (sc.horizon_s - res.sleep_from_s[i]))
                  .epsilon(1e-9));
        const double recomputed = tx + sc.rx_idle_power_w * res.sleep_from_s[i] +
                                  sc.sleep_power_w * (sc.horizon_s - res.sleep_from_s[i]);
        CHECK(l.total() == doctest::Approx(recomputed).epsilon(1e-9));
        CHECK(l.tx_joules >= 0.0);
        CHECK(l.idle_joules >= 0.0);
    }
}

TEST_CASE("phase ordering and causality are visible in the trace") {
    Scenario sc = load_scenario_file("configs/default.cfg");
    sc.n_sensors = 10;
    sc.replications = 1;
    sc.finalize();
    std::ostringstream trace;
    simulate_run(sc, 21, &trace);
    const auto lines = parse_trace(trace.str());

    double max_wakeup_tx = -1.0, min_nbr_tx = 1e9, max_nbr_tx = -1.0;
    double min_req_tx = 1e9, min_reply_tx = 1e9;
    std::map<int, double> first_tx_of_sender;
    for (const auto& l : lines) {
        if (l.kind.rfind("tx:", 0) == 0) {
            if (!first_tx_of_sender.count(l.node)) first_tx_of_sender[l.node] = l.time;
            if (l.kind == "tx:wakeup") max_wakeup_tx = std::max(max_wakeup_tx, l.time);
            if (l.kind == "tx:anchornbr") {
                min_nbr_tx = std::min(min_nbr_tx, l.time);
                max_nbr_tx = std::max(max_nbr_tx, l.time);
            }
            if (l.kind == "tx:request") min_req_tx = std::min(min_req_tx, l.time);
            if (l.kind == "tx:reply") min_reply_tx = std::min(min_reply_tx, l.time);
        } else {
            CHECK(l.time > first_tx_of_sender[l.peer]);  // no reception before any tx
        }
    }
    CHECK(max_wakeup_tx < min_nbr_tx);
    CHECK(max_nbr_tx < min_req_tx);
    CHECK(min_req_tx < min_reply_tx);
}

TEST_CASE("policy power conformance is auditable from traces") {
    Scenario base = load_scenario_file("configs/default.cfg");
    base.n_sensors = 12;
    base.replications = 1;

    auto request_powers = [&](Policy p) {
        Scenario sc = base;
        sc.policy = p;
        sc.finalize();
        std::ostringstream trace;
        simulate_run(sc, 31, &trace);
        std::vector<double> req, reply;
        for (const auto& l : parse_trace(trace.str())) {
            if (l.kind == "tx:request") req.push_back(l.power);
            if (l.kind == "tx:reply") reply.push_back(l.power);
        }
        return std::make_pair(req, reply);
    };

    const auto [oltc_req, oltc_reply] = request_powers(Policy::oltc);
    REQUIRE_FALSE(oltc_req.empty());
    for (double p : oltc_req) CHECK(p == base.game.p_max_watts);

    const auto [max_req, max_reply] = request_powers(Policy::eela_max);
    for (double p : max_req) CHECK(p == base.game.p_max_watts);
    REQUIRE_FALSE(max_reply.empty());
    for (double p : max_reply) CHECK(p == base.game.q_max_watts);

    Scenario min_sc = base;
    min_sc.policy = Policy::eela_min;
    min_sc.finalize();
    const auto [min_req, min_reply] = request_powers(Policy::eela_min);
    for (double p : min_req) CHECK(p == doctest::Approx(min_sc.fixed_min_power_watts));
    for (double p : min_reply) CHECK(p == doctest::Approx(min_sc.fixed_min_power_watts));

    const auto [eela_req, eela_reply] = request_powers(Policy::eela);
    REQUIRE_FALSE(eela_req.empty());
    for (double p : eela_req) {
        CHECK(p > 0.0);
        CHECK(p <= base.game.p_max_watts);
    }
    for (double p : eela_reply) CHECK(p <= base.game.q_max_watts);
}

TEST_CASE("anchors stay on the surface and sensors keep their depth") {
    Scenario sc = load_scenario_file("configs/default.cfg");
    sc.n_sensors = 8;
    sc.replications = 1;
    sc.finalize();
    const RunResult res = simulate_run(sc, 17, nullptr);
    (void)res;
    // Anchor sleep accounting runs to the horizon; sensors may sleep earlier.
    for (std::size_t i = 0; i < res.roles.size(); ++i) {
        if (res.roles[i] == NodeRole::anchor) {
            CHECK(res.sleep_from_s[i] == sc.horizon_s);
        } else {
            CHECK(res.sleep_from_s[i] <= sc.horizon_s);
        }
    }
}
