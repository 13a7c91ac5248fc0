#include "eela/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "eela/localization.hpp"

namespace eela {

MessageType type_of(const Message& msg) {
    switch (msg.index()) {
        case 0: return MessageType::wakeup;
        case 1: return MessageType::anchor_nbr;
        case 2: return MessageType::request;
        default: return MessageType::reply;
    }
}

const char* type_name(MessageType t) {
    switch (t) {
        case MessageType::wakeup: return "wakeup";
        case MessageType::anchor_nbr: return "anchornbr";
        case MessageType::request: return "request";
        case MessageType::reply: return "reply";
    }
    return "?";
}

std::size_t wire_size_bytes(const Message& msg) {
    switch (type_of(msg)) {
        case MessageType::wakeup: return 16;
        case MessageType::anchor_nbr:
            return 16 + 12 * std::get<AnchorNbrMsg>(msg).entries.size();
        case MessageType::request: return 20;
        case MessageType::reply: return 28;
    }
    return 0;
}

double tx_duration_s(const Message& msg, double data_rate_bps) {
    return static_cast<double>(wire_size_bytes(msg)) * 8.0 / data_rate_bps;
}

namespace {

NeighborEntry* find_entry(std::vector<NeighborEntry>& neighbors, int anchor_id) {
    for (NeighborEntry& e : neighbors) {
        if (e.anchor_id == anchor_id) return &e;
    }
    return nullptr;
}

void upsert_one_hop(std::vector<NeighborEntry>& neighbors, int anchor_id,
                    const Position3D& position, double q_watts, double tx_time_s,
                    double rx_time_s, const ChannelParams& chan) {
    const double dist = toa_distance(tx_time_s, rx_time_s, chan);
    NeighborEntry* e = find_entry(neighbors, anchor_id);
    if (e == nullptr) {
        neighbors.push_back({anchor_id, HopClass::one_hop, position, q_watts, rx_time_s, dist,
                             std::nullopt});
        return;
    }
    // Hearing an anchor directly promotes it; the freshest beacon wins.
    e->hop_class = HopClass::one_hop;
    e->last_position = position;
    e->last_q_watts = q_watts;
    e->rx_time_s = rx_time_s;
    e->toa_distance_m = dist;
    e->via_anchor.reset();
}

}  // namespace

void note_wakeup(std::vector<NeighborEntry>& neighbors, const WakeupMsg& msg, double rx_time_s,
                 const ChannelParams& chan) {
    upsert_one_hop(neighbors, msg.sender_id, msg.position, msg.q_watts, msg.timestamp_s,
                   rx_time_s, chan);
}

void note_anchor_nbr(std::vector<NeighborEntry>& neighbors, const AnchorNbrMsg& msg,
                     double rx_time_s, const ChannelParams& chan) {
    // The sender's own entry doubles as a one-hop beacon.
    const AnchorInfo* self = nullptr;
    for (const AnchorInfo& e : msg.entries) {
        if (e.anchor_id == msg.sender_id) self = &e;
    }
    if (self != nullptr) {
        upsert_one_hop(neighbors, msg.sender_id, self->position, self->q_watts, msg.timestamp_s,
                       rx_time_s, chan);
    }
    const NeighborEntry* relay = find_entry(neighbors, msg.sender_id);
    if (relay == nullptr || relay->hop_class != HopClass::one_hop) return;

    for (const AnchorInfo& e : msg.entries) {
        if (e.anchor_id == msg.sender_id) continue;
        NeighborEntry* existing = find_entry(neighbors, e.anchor_id);
        if (existing != nullptr && existing->hop_class == HopClass::one_hop) continue;
        const double escalation = relay->toa_distance_m +
                                  distance(relay->last_position, e.position);
        if (existing == nullptr) {
            neighbors.push_back({e.anchor_id, HopClass::two_hop, e.position, e.q_watts,
                                 rx_time_s, escalation, msg.sender_id});
            continue;
        }
        // Keep the cheaper escalation path.
        if (escalation < existing->toa_distance_m) {
            existing->last_position = e.position;
            existing->last_q_watts = e.q_watts;
            existing->rx_time_s = rx_time_s;
            existing->toa_distance_m = escalation;
            existing->via_anchor = msg.sender_id;
        }
    }
}

double two_hop_power(const NeighborEntry& one_hop, const NeighborEntry& two_hop,
                     const ChannelParams& chan, TwoHopRule rule) {
    if (!two_hop.via_anchor || *two_hop.via_anchor != one_hop.anchor_id) {
        throw std::invalid_argument("two_hop_power: entries are not linked by a via relay");
    }
    const double d31 = one_hop.toa_distance_m;
    const double d12 = distance(one_hop.last_position, two_hop.last_position);
    if (rule == TwoHopRule::sum) {
        return power_for_range(d31, chan) + power_for_range(d12, chan);
    }
    return power_for_range(d31 + d12, chan);
}

std::string to_string(TwoHopRule rule) {
    return rule == TwoHopRule::range ? "range" : "sum";
}

std::optional<TwoHopRule> parse_two_hop_rule(const std::string& name) {
    if (name == "range") return TwoHopRule::range;
    if (name == "sum") return TwoHopRule::sum;
    return std::nullopt;
}

namespace {

struct Target {
    int anchor_id;
    double required_power;
};

// Leader observation over the sensor's actual neighbor table: a step-function
// neighbor count over the escalation targets.
LeaderObservation step_observation(std::span<const NeighborEntry> neighbors,
                                   const std::vector<Target>& targets) {
    LeaderObservation obs;
    obs.reply_powers_watts.reserve(neighbors.size());
    for (const NeighborEntry& e : neighbors) obs.reply_powers_watts.push_back(e.last_q_watts);
    auto powers = std::make_shared<std::vector<double>>();
    powers->reserve(targets.size());
    for (const Target& t : targets) powers->push_back(t.required_power);
    std::sort(powers->begin(), powers->end());
    obs.neighbor_count = [powers](double p) {
        return static_cast<double>(
            std::upper_bound(powers->begin(), powers->end(), p) - powers->begin());
    };
    return obs;
}

}  // namespace

PowerDecision sensor_choose_power(std::span<const NeighborEntry> neighbors,
                                  const GameParams& gp, const ChannelParams& chan,
                                  TwoHopRule rule) {
    std::vector<const NeighborEntry*> one_hop;
    std::vector<const NeighborEntry*> two_hop;
    for (const NeighborEntry& e : neighbors) {
        (e.hop_class == HopClass::one_hop ? one_hop : two_hop).push_back(&e);
    }
    const int visible = static_cast<int>(one_hop.size() + two_hop.size());
    const int n_req = required_anchors(gp.n_min_req, visible);

    if (visible < gp.n_min_req) {
        return {gp.p_max_watts, n_req};
    }

    std::vector<Target> targets;
    for (const NeighborEntry* e : one_hop) {
        targets.push_back({e->anchor_id, power_for_range(e->toa_distance_m, chan)});
    }
    if (static_cast<int>(one_hop.size()) < gp.n_min_req) {
        // Escalate through relays until the required count is reachable.
        for (const NeighborEntry* t : two_hop) {
            const NeighborEntry* relay = nullptr;
            for (const NeighborEntry* o : one_hop) {
                if (t->via_anchor && o->anchor_id == *t->via_anchor) relay = o;
            }
            if (relay == nullptr) continue;
            targets.push_back({t->anchor_id, two_hop_power(*relay, *t, chan, rule)});
        }
    }
    std::sort(targets.begin(), targets.end(), [](const Target& a, const Target& b) {
        return a.required_power < b.required_power;
    });
    if (static_cast<int>(targets.size()) < gp.n_min_req) {
        return {gp.p_max_watts, n_req};  // relays lost: treat as not enough anchors
    }

    const LeaderObservation obs = step_observation(neighbors, targets);
    const double cover_power = targets[gp.n_min_req - 1].required_power;

    // Candidates: every power that brings one more target into range, plus the
    // smooth-terms stationary point inside its step interval.
    std::vector<double> candidates;
    for (std::size_t k = gp.n_min_req - 1; k < targets.size(); ++k) {
        candidates.push_back(targets[k].required_power);
    }
    const double p_hat = std::sqrt(gp.w2_sensor * gp.total_energy_sensor * obs.sum_power() /
                                   (gp.w1_sensor * gp.cost_per_unit_power_sensor));
    if (p_hat > cover_power) candidates.push_back(std::min(p_hat, gp.p_max_watts));

    double best_power = cover_power;
    double best_utility = leader_utility(std::max(cover_power, power_floor(chan)), obs, gp, chan);
    for (const double c : candidates) {
        const double p = std::max(c, power_floor(chan));
        const double u = leader_utility(p, obs, gp, chan);
        if (u > best_utility || (u == best_utility && p < best_power)) {
            best_utility = u;
            best_power = p;
        }
    }
    return {std::min(best_power, gp.p_max_watts), n_req};
}

}  // namespace eela
