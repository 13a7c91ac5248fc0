#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <vector>

#include "eela/localization.hpp"
#include "eela/mobility.hpp"
#include "eela/protocol.hpp"
#include "eela/rng.hpp"
#include "eela/scenario.hpp"

namespace eela {

enum class NodeRole { sensor, anchor };

// Two reception (or transmission) intervals destroy each other iff they
// overlap with positive measure; half-open intervals, so back-to-back packets
// with end == start both survive.
inline bool intervals_collide(double a_start, double a_end, double b_start, double b_end) {
    return a_start < b_end && b_start < a_end;
}

enum class EventKind {
    transmit_start,
    transmit_end,
    receive,
    timer,
    mobility_step,
    phase_boundary,
};

struct EnergyLedger {
    double tx_joules = 0.0;
    double rx_joules = 0.0;
    double idle_joules = 0.0;
    double sleep_joules = 0.0;

    double total() const { return tx_joules + rx_joules + idle_joules + sleep_joules; }
};

struct SensorOutcome {
    int node_id = -1;
    bool localized = false;
    int retries = 0;
    double first_request_s = -1.0;
    double localized_at_s = -1.0;
    double error_m = 0.0;  // valid when localized
    Position3D estimate;
    Position3D true_position_at_fix;
};

// Per-transmission record kept for energy-conservation audits.
struct TxAuditEntry {
    double power_watts;
    double duration_s;
};

struct RunResult {
    std::vector<NodeRole> roles;
    std::vector<EnergyLedger> ledgers;
    std::vector<SensorOutcome> sensors;
    std::vector<std::vector<TxAuditEntry>> tx_audit;  // per node
    std::vector<double> rx_busy_s;                    // per node
    std::vector<double> sleep_from_s;                 // per node (horizon if never slept)
    std::uint64_t delivered = 0;
    std::uint64_t collided = 0;
    std::uint64_t dropped_busy = 0;
    std::uint64_t dropped_asleep = 0;
    int solver_fallbacks = 0;
    double horizon_s = 0.0;
};

// Deterministic single-run discrete-event simulator. Events pop in
// (fire_time, sequence) order; all randomness comes from one seeded generator
// whose draws are ordered by the event sequence, so identical
// (scenario, seed) pairs reproduce the run bit for bit. The optional trace
// stream receives one tab-separated record per radio event:
//   time_s  kind  node_id  peer_id  power_watts  outcome
class Simulator {
public:
    Simulator(const Scenario& scenario, std::uint64_t run_seed, std::ostream* trace = nullptr);

    RunResult run();

private:
    struct Packet {
        Message msg;
        int sender = -1;
        double power_watts = 0.0;
        double tx_time_s = 0.0;
        double duration_s = 0.0;
    };

    struct Reception {
        double arrival_s = 0.0;
        double end_s = 0.0;
        Packet packet;
        bool resolved = false;
    };

    struct TxSpan {
        double start_s;
        double end_s;
    };

    // A transmission scheduled for the future; the concrete message is built
    // at transmit time so timestamps and positions match the actual send.
    struct TxIntent {
        MessageType type = MessageType::wakeup;
        double power_watts = 0.0;
        int round = -1;
    };

    struct Event {
        double time = 0.0;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::timer;
        int node = -1;
        int aux = -1;  // reception slot, round index, ...
        std::optional<TxIntent> intent;
        std::optional<Packet> packet;
    };

    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    struct Node {
        int id = -1;
        NodeRole role = NodeRole::sensor;
        DrifterState drift;
        double last_step_s = 0.0;
        EnergyLedger ledger;
        double sleep_from_s;  // horizon unless the node went to sleep earlier
        double rx_busy_s = 0.0;
        std::vector<TxSpan> tx_spans;
        std::vector<Reception> receptions;
        std::vector<NeighborEntry> neighbors;       // known anchors (sensors: 1/2-hop; anchors: peers)
        std::map<int, RangeObservation> beacons;    // sensors: deduplicated replies
        FollowerObservation pending;                // anchors: requests in the open window
        int retries = 0;
        bool localized = false;
        double first_request_s = -1.0;
        double localized_at_s = -1.0;
        Position3D estimate;
        Position3D true_at_fix;
        std::vector<TxAuditEntry> audit;
    };

    void schedule(Event ev);
    void schedule_transmission(int node, double at, TxIntent intent);
    Position3D position_at(const Node& n, double t) const;
    bool asleep(const Node& n, double t) const { return t >= n.sleep_from_s; }

    void handle_transmit_start(const Event& ev);
    void handle_transmit_end(const Event& ev);
    void handle_receive(const Event& ev);
    void handle_reception_complete(const Event& ev);
    void handle_mobility_step(const Event& ev);
    void handle_round_start(const Event& ev);
    void handle_reply_window(const Event& ev);

    Message build_message(Node& n, const TxIntent& intent);
    void broadcast(Node& sender, const Packet& packet);
    void deliver(Node& receiver, const Reception& r);
    void on_wakeup(Node& receiver, const Packet& p);
    void on_anchor_nbr(Node& receiver, const Packet& p);
    void on_request(Node& receiver, const Packet& p);
    void on_reply(Node& receiver, const Packet& p, double arrival_s);
    void try_localize(Node& sensor, double now_s);

    double beacon_power(const Node& anchor) const;
    PowerDecision request_decision(const Node& sensor);

    void trace_tx(const Packet& p);
    void trace_rx(const Reception& r, int receiver, const char* outcome);

    const Scenario& sc_;
    MeanderingField field_;
    Rng rng_;
    std::ostream* trace_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::vector<Node> nodes_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;
    RunResult stats_;
};

RunResult simulate_run(const Scenario& scenario, std::uint64_t run_seed,
                       std::ostream* trace = nullptr);

}  // namespace eela
