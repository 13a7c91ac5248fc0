#include "eela/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>

namespace eela {

namespace {

constexpr int kTimerReceptionComplete = 0;

const char* trace_kind(MessageType t, bool tx) {
    switch (t) {
        case MessageType::wakeup: return tx ? "tx:wakeup" : "rx:wakeup";
        case MessageType::anchor_nbr: return tx ? "tx:anchornbr" : "rx:anchornbr";
        case MessageType::request: return tx ? "tx:request" : "rx:request";
        case MessageType::reply: return tx ? "tx:reply" : "rx:reply";
    }
    return "?";
}

}  // namespace

Simulator::Simulator(const Scenario& scenario, std::uint64_t run_seed, std::ostream* trace)
    : sc_(scenario),
      field_([&] {
          CurrentField f = scenario.field;
          f.seed = derive_seed(run_seed, 0x0F1E2D3C);
          return f;
      }(), scenario.region_side_m, scenario.region_depth_m),
      rng_(derive_seed(run_seed, 0xA5A5A5A5)),
      trace_(trace) {
    stats_.horizon_s = sc_.horizon_s;

    const int total = sc_.n_anchors + sc_.n_sensors;
    nodes_.resize(total);
    for (int i = 0; i < total; ++i) {
        Node& n = nodes_[i];
        n.id = i;
        n.role = i < sc_.n_anchors ? NodeRole::anchor : NodeRole::sensor;
        n.sleep_from_s = sc_.horizon_s;
        if (!sc_.initial_positions.empty()) {
            n.drift.pos = sc_.initial_positions[i];
        } else if (n.role == NodeRole::anchor) {
            n.drift.pos = {rng_.uniform(0.0, sc_.region_side_m),
                           rng_.uniform(0.0, sc_.region_side_m), 0.0};
        } else {
            n.drift.pos = {rng_.uniform(0.0, sc_.region_side_m),
                           rng_.uniform(0.0, sc_.region_side_m),
                           rng_.uniform(0.0, sc_.region_depth_m)};
        }
        if (n.role == NodeRole::anchor) n.drift.pos.z = 0.0;
    }
}

void Simulator::schedule(Event ev) {
    ev.seq = seq_++;
    queue_.push(std::move(ev));
}

void Simulator::schedule_transmission(int node, double at, TxIntent intent) {
    Event ev;
    ev.time = at;
    ev.kind = EventKind::transmit_start;
    ev.node = node;
    ev.intent = intent;
    schedule(std::move(ev));
}

Position3D Simulator::position_at(const Node& n, double t) const {
    const double dt = t - n.last_step_s;
    Position3D p = n.drift.pos;
    p.x = std::clamp(p.x + n.drift.vel.x * dt, 0.0, sc_.region_side_m);
    p.y = std::clamp(p.y + n.drift.vel.y * dt, 0.0, sc_.region_side_m);
    p.z = std::clamp(p.z + n.drift.vel.z * dt, 0.0, sc_.region_depth_m);
    return p;
}

double Simulator::beacon_power(const Node&) const {
    switch (sc_.policy) {
        case Policy::eela_min: return sc_.fixed_min_power_watts;
        case Policy::eela_max: return sc_.game.q_max_watts;
        default: return sc_.q_ini_watts;  // EELA and OLTC beacon at the initial power
    }
}

PowerDecision Simulator::request_decision(const Node& sensor) {
    const int visible = static_cast<int>(sensor.neighbors.size());
    const int n_req = required_anchors(sc_.game.n_min_req, visible);
    switch (sc_.policy) {
        case Policy::oltc: return {sc_.game.p_max_watts, n_req};
        case Policy::eela_min: return {sc_.fixed_min_power_watts, n_req};
        case Policy::eela_max: return {sc_.game.p_max_watts, n_req};
        case Policy::eela:
            return sensor_choose_power(sensor.neighbors, sc_.game, sc_.channel, sc_.twohop_rule);
    }
    return {sc_.game.p_max_watts, n_req};
}

Message Simulator::build_message(Node& n, const TxIntent& intent) {
    const Position3D pos = position_at(n, now_);
    switch (intent.type) {
        case MessageType::wakeup:
            return WakeupMsg{n.id, now_, pos, intent.power_watts};
        case MessageType::anchor_nbr: {
            AnchorNbrMsg msg{n.id, now_, {}};
            msg.entries.push_back({n.id, pos, intent.power_watts});
            for (const NeighborEntry& e : n.neighbors) {
                msg.entries.push_back({e.anchor_id, e.last_position, e.last_q_watts});
            }
            return msg;
        }
        case MessageType::request: {
            // n_req is evaluated at send time against the current neighbor set.
            const int visible = static_cast<int>(n.neighbors.size());
            if (n.first_request_s < 0.0) n.first_request_s = now_;
            return RequestMsg{n.id, now_, required_anchors(sc_.game.n_min_req, visible),
                              intent.power_watts};
        }
        case MessageType::reply:
            return ReplyMsg{n.id, now_, pos, intent.power_watts};
    }
    return WakeupMsg{};
}

void Simulator::trace_tx(const Packet& p) {
    if (trace_ == nullptr) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.9f\t%s\t%d\t%d\t%.9g\t%s\n", p.tx_time_s,
                  trace_kind(type_of(p.msg), true), p.sender, -1, p.power_watts, "sent");
    *trace_ << buf;
}

void Simulator::trace_rx(const Reception& r, int receiver, const char* outcome) {
    if (trace_ == nullptr) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.9f\t%s\t%d\t%d\t%.9g\t%s\n", r.arrival_s,
                  trace_kind(type_of(r.packet.msg), false), receiver, r.packet.sender,
                  r.packet.power_watts, outcome);
    *trace_ << buf;
}

void Simulator::broadcast(Node& sender, const Packet& packet) {
    sender.tx_spans.push_back({packet.tx_time_s, packet.tx_time_s + packet.duration_s});
    sender.ledger.tx_joules += packet.power_watts * packet.duration_s;
    sender.audit.push_back({packet.power_watts, packet.duration_s});
    trace_tx(packet);

    Event end;
    end.time = packet.tx_time_s + packet.duration_s;
    end.kind = EventKind::transmit_end;
    end.node = sender.id;
    schedule(std::move(end));

    const double reach = range_for_power(packet.power_watts, sc_.channel);
    const Position3D from = position_at(sender, packet.tx_time_s);
    for (Node& other : nodes_) {
        if (other.id == sender.id) continue;
        const double dist = distance(from, position_at(other, packet.tx_time_s));
        if (dist > reach) continue;
        Event ev;
        ev.time = packet.tx_time_s + propagation_delay(dist, sc_.channel);
        ev.kind = EventKind::receive;
        ev.node = other.id;
        ev.packet = packet;
        schedule(std::move(ev));
    }
}

void Simulator::handle_transmit_start(const Event& ev) {
    Node& n = nodes_[ev.node];
    if (asleep(n, now_)) return;
    if (n.role == NodeRole::sensor && n.localized) return;  // localized between scheduling and tx
    Packet p;
    p.msg = build_message(n, *ev.intent);
    p.sender = n.id;
    p.power_watts = ev.intent->power_watts;
    p.tx_time_s = now_;
    p.duration_s = tx_duration_s(p.msg, sc_.data_rate_bps);
    broadcast(n, p);
}

void Simulator::handle_transmit_end(const Event&) {
    // Radio bookkeeping only; the span list already carries the interval.
}

void Simulator::handle_receive(const Event& ev) {
    Node& n = nodes_[ev.node];
    Reception r;
    r.arrival_s = now_;
    r.end_s = now_ + ev.packet->duration_s;
    r.packet = *ev.packet;
    if (asleep(n, now_)) {
        ++stats_.dropped_asleep;
        trace_rx(r, n.id, "asleep");
        return;
    }
    n.receptions.push_back(r);
    Event done;
    done.time = r.end_s;
    done.kind = EventKind::timer;
    done.node = n.id;
    done.aux = kTimerReceptionComplete;
    schedule(std::move(done));
}

void Simulator::handle_reception_complete(const Event& ev) {
    Node& n = nodes_[ev.node];
    // Resolve every reception that has fully arrived by now.
    for (std::size_t i = 0; i < n.receptions.size(); ++i) {
        Reception& r = n.receptions[i];
        if (r.resolved || r.end_s > now_ + 1e-12) continue;
        r.resolved = true;

        bool busy = false;
        for (const TxSpan& span : n.tx_spans) {
            if (intervals_collide(r.arrival_s, r.end_s, span.start_s, span.end_s)) busy = true;
        }
        bool collided = false;
        for (std::size_t j = 0; j < n.receptions.size(); ++j) {
            if (j == i) continue;
            const Reception& other = n.receptions[j];
            if (intervals_collide(r.arrival_s, r.end_s, other.arrival_s, other.end_s)) collided = true;
        }
        if (asleep(n, r.end_s)) {
            ++stats_.dropped_asleep;
            trace_rx(r, n.id, "asleep");
        } else if (busy) {
            ++stats_.dropped_busy;
            trace_rx(r, n.id, "busy");
        } else if (collided) {
            ++stats_.collided;
            trace_rx(r, n.id, "collided");
        } else {
            ++stats_.delivered;
            n.ledger.rx_joules += sc_.rx_idle_power_w * r.packet.duration_s;
            n.rx_busy_s += r.packet.duration_s;
            trace_rx(r, n.id, "delivered");
            deliver(n, r);
        }
    }
    // Drop records that can no longer overlap anything new.
    const double keep_after = now_ - 4.0;
    std::erase_if(n.receptions,
                  [&](const Reception& r) { return r.resolved && r.end_s < keep_after; });
    std::erase_if(n.tx_spans, [&](const TxSpan& s) { return s.end_s < keep_after; });
}

void Simulator::deliver(Node& receiver, const Reception& r) {
    switch (type_of(r.packet.msg)) {
        case MessageType::wakeup: on_wakeup(receiver, r.packet); break;
        case MessageType::anchor_nbr: on_anchor_nbr(receiver, r.packet); break;
        case MessageType::request: on_request(receiver, r.packet); break;
        case MessageType::reply: on_reply(receiver, r.packet, r.arrival_s); break;
    }
}

void Simulator::on_wakeup(Node& receiver, const Packet& p) {
    note_wakeup(receiver.neighbors, std::get<WakeupMsg>(p.msg), now_, sc_.channel);
}

void Simulator::on_anchor_nbr(Node& receiver, const Packet& p) {
    if (receiver.role == NodeRole::sensor) {
        note_anchor_nbr(receiver.neighbors, std::get<AnchorNbrMsg>(p.msg), now_, sc_.channel);
    }
    // Anchors keep only their directly heard peers.
}

void Simulator::on_request(Node& receiver, const Packet& p) {
    if (receiver.role != NodeRole::anchor) return;
    const RequestMsg& msg = std::get<RequestMsg>(p.msg);
    receiver.pending.request_powers_watts.push_back(msg.p_watts);
    receiver.pending.req_counts.push_back(msg.n_req);
}

void Simulator::on_reply(Node& receiver, const Packet& p, double arrival_s) {
    if (receiver.role != NodeRole::sensor || receiver.localized) return;
    const ReplyMsg& msg = std::get<ReplyMsg>(p.msg);
    // A reply is also a fresh one-hop beacon: feed the neighbor table so the
    // next round's power decision starts from better knowledge.
    note_wakeup(receiver.neighbors,
                WakeupMsg{msg.sender_id, msg.timestamp_s, msg.location, msg.q_watts}, arrival_s,
                sc_.channel);
    RangeObservation obs;
    obs.anchor_id = msg.sender_id;
    obs.anchor_position = msg.location;
    obs.distance_m = toa_distance(msg.timestamp_s, arrival_s, sc_.channel);
    obs.observed_at_s = arrival_s;
    receiver.beacons[obs.anchor_id] = obs;  // duplicate anchors keep the freshest beacon
    try_localize(receiver, now_);
}

void Simulator::try_localize(Node& sensor, double now_s) {
    if (static_cast<int>(sensor.beacons.size()) < sc_.game.n_min_req) return;
    std::vector<RangeObservation> obs;
    obs.reserve(sensor.beacons.size());
    for (const auto& [id, o] : sensor.beacons) obs.push_back(o);
    const Position3D truth = position_at(sensor, now_s);
    const TrilaterationOutcome out = trilaterate(obs, truth.z);
    if (!out.ok) return;  // keep collecting beacons, retries continue
    // An estimate far outside the deployment region means the beacon set was
    // geometrically useless (stale ranges, grazing geometry); wait for better.
    const double slack = 0.1 * sc_.region_side_m;
    if (out.position.x < -slack || out.position.x > sc_.region_side_m + slack ||
        out.position.y < -slack || out.position.y > sc_.region_side_m + slack) {
        return;
    }
    sensor.localized = true;
    sensor.localized_at_s = now_s;
    sensor.estimate = out.position;
    sensor.true_at_fix = truth;
    sensor.sleep_from_s = now_s;
}

void Simulator::handle_mobility_step(const Event&) {
    std::vector<DrifterState> drifters(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) drifters[i] = nodes_[i].drift;
    advance(drifters, now_, sc_.timing.mobility_dt_s, field_);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        nodes_[i].drift = drifters[i];
        nodes_[i].last_step_s = now_ + sc_.timing.mobility_dt_s;
    }
    const double next = now_ + sc_.timing.mobility_dt_s;
    if (next < sc_.horizon_s) {
        Event ev;
        ev.time = next;
        ev.kind = EventKind::mobility_step;
        schedule(std::move(ev));
    }
}

void Simulator::handle_round_start(const Event& ev) {
    const int round = ev.aux;
    for (Node& n : nodes_) {
        if (n.role != NodeRole::sensor || n.localized || asleep(n, now_)) continue;
        if (round > 0) {
            if (n.retries >= sc_.timing.max_retries) continue;
            ++n.retries;
        }
        const PowerDecision d = request_decision(n);
        TxIntent intent;
        intent.type = MessageType::request;
        intent.power_watts = d.power_watts;
        intent.round = round;
        schedule_transmission(n.id, now_ + rng_.uniform(0.0, sc_.timing.request_jitter_s),
                              intent);
    }
}

void Simulator::handle_reply_window(const Event& ev) {
    for (Node& n : nodes_) {
        if (n.role != NodeRole::anchor) continue;
        std::optional<double> power;
        switch (sc_.policy) {
            case Policy::eela_max:
                power = sc_.game.q_max_watts;  // beacons regardless of requests
                break;
            case Policy::eela_min:
                if (n.pending.n_arx() > 0) power = sc_.fixed_min_power_watts;
                break;
            case Policy::eela:
            case Policy::oltc:
                if (n.pending.n_arx() > 0) {
                    power = follower_best_response(n.pending, sc_.game, sc_.channel,
                                                   &stats_.solver_fallbacks);
                }
                break;
        }
        n.pending = {};  // later requests accumulate toward the next window
        if (!power) continue;
        TxIntent intent;
        intent.type = MessageType::reply;
        intent.power_watts = std::clamp(*power, power_floor(sc_.channel), sc_.game.q_max_watts);
        intent.round = ev.aux;
        schedule_transmission(n.id, now_ + rng_.uniform(0.0, sc_.timing.reply_backoff_s),
                              intent);
    }
}

RunResult Simulator::run() {
    // Phase 1: anchors wake the field up; phase 2: they share their neighbor
    // lists (skipped by OLTC); phases 3-4 repeat as request/reply rounds.
    for (Node& n : nodes_) {
        if (n.role != NodeRole::anchor) continue;
        TxIntent intent;
        intent.type = MessageType::wakeup;
        intent.power_watts = beacon_power(n);
        schedule_transmission(n.id, rng_.uniform(0.0, sc_.timing.wakeup_jitter_s), intent);
    }
    if (sc_.policy != Policy::oltc) {
        for (Node& n : nodes_) {
            if (n.role != NodeRole::anchor) continue;
            TxIntent intent;
            intent.type = MessageType::anchor_nbr;
            intent.power_watts = beacon_power(n);
            schedule_transmission(
                n.id, sc_.timing.phase2_start_s + rng_.uniform(0.0, sc_.timing.wakeup_jitter_s),
                intent);
        }
    }
    for (int round = 0; round <= sc_.timing.max_retries; ++round) {
        if (sc_.round_start_s(round) >= sc_.horizon_s) break;
        Event start;
        start.time = sc_.round_start_s(round);
        start.kind = EventKind::phase_boundary;
        start.aux = round;
        schedule(std::move(start));
        Event window;
        window.time = sc_.reply_window_close_s(round);
        window.kind = EventKind::phase_boundary;
        window.aux = ~round;  // negative aux marks the window-close boundary
        schedule(std::move(window));
    }
    Event mob;
    mob.time = 0.0;
    mob.kind = EventKind::mobility_step;
    schedule(std::move(mob));

    while (!queue_.empty()) {
        const Event ev = queue_.top();
        queue_.pop();
        if (ev.time > sc_.horizon_s) break;
        assert(ev.time >= now_);
        now_ = ev.time;
        switch (ev.kind) {
            case EventKind::transmit_start: handle_transmit_start(ev); break;
            case EventKind::transmit_end: handle_transmit_end(ev); break;
            case EventKind::receive: handle_receive(ev); break;
            case EventKind::timer:
                if (ev.aux == kTimerReceptionComplete) handle_reception_complete(ev);
                break;
            case EventKind::mobility_step: handle_mobility_step(ev); break;
            case EventKind::phase_boundary:
                if (ev.aux >= 0) {
                    handle_round_start(ev);
                } else {
                    Event unmasked = ev;
                    unmasked.aux = ~ev.aux;
                    handle_reply_window(unmasked);
                }
                break;
        }
    }

    // Close the books: idle until sleep, sleep until the horizon.
    stats_.roles.resize(nodes_.size());
    stats_.ledgers.resize(nodes_.size());
    stats_.tx_audit.resize(nodes_.size());
    stats_.rx_busy_s.resize(nodes_.size());
    stats_.sleep_from_s.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Node& n = nodes_[i];
        const double awake = std::min(n.sleep_from_s, sc_.horizon_s);
        n.ledger.idle_joules = sc_.rx_idle_power_w * (awake - n.rx_busy_s);
        n.ledger.sleep_joules = sc_.sleep_power_w * (sc_.horizon_s - awake);
        stats_.roles[i] = n.role;
        stats_.ledgers[i] = n.ledger;
        stats_.tx_audit[i] = n.audit;
        stats_.rx_busy_s[i] = n.rx_busy_s;
        stats_.sleep_from_s[i] = awake;
        if (n.role == NodeRole::sensor) {
            SensorOutcome out;
            out.node_id = n.id;
            out.localized = n.localized;
            out.retries = n.retries;
            out.first_request_s = n.first_request_s;
            out.localized_at_s = n.localized_at_s;
            out.estimate = n.estimate;
            out.true_position_at_fix = n.true_at_fix;
            if (n.localized) out.error_m = localization_error(n.true_at_fix, n.estimate);
            stats_.sensors.push_back(out);
        }
    }
    return std::move(stats_);
}

RunResult simulate_run(const Scenario& scenario, std::uint64_t run_seed, std::ostream* trace) {
    Simulator sim(scenario, run_seed, trace);
    return sim.run();
}

}  // namespace eela
