#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eela/acoustics.hpp"
#include "eela/game.hpp"
#include "eela/geometry.hpp"

namespace eela {

// Beacon-level knowledge about one anchor: id, self-reported position and the
// transmit power the beacon was sent with.
struct AnchorInfo {
    int anchor_id = -1;
    Position3D position;
    double q_watts = 0.0;
};

// The four protocol messages. Timestamps equal the sender's transmit time
// (all nodes are time-synchronized). Wakeup and AnchorNbr carry positions and
// powers because both the two-hop range estimate and the leader's observed
// sum of anchor powers are built from overheard beacons.
struct WakeupMsg {
    int sender_id = -1;
    double timestamp_s = 0.0;
    Position3D position;
    double q_watts = 0.0;
};

struct AnchorNbrMsg {
    int sender_id = -1;
    double timestamp_s = 0.0;
    std::vector<AnchorInfo> entries;  // the sender lists itself first
};

struct RequestMsg {
    int sender_id = -1;
    double timestamp_s = 0.0;
    int n_req = 0;  // additional anchors still needed; never exceeds n_min_req
    double p_watts = 0.0;
};

struct ReplyMsg {
    int sender_id = -1;
    double timestamp_s = 0.0;
    Position3D location;
    double q_watts = 0.0;
};

using Message = std::variant<WakeupMsg, AnchorNbrMsg, RequestMsg, ReplyMsg>;

enum class MessageType { wakeup, anchor_nbr, request, reply };

MessageType type_of(const Message& msg);
const char* type_name(MessageType t);

// Fixed wire sizes: Wakeup 16 B, AnchorNbr 16 B + 12 B/entry, Request 20 B,
// Reply 28 B.
std::size_t wire_size_bytes(const Message& msg);
double tx_duration_s(const Message& msg, double data_rate_bps);

enum class HopClass { one_hop, two_hop };

struct NeighborEntry {
    int anchor_id = -1;
    HopClass hop_class = HopClass::one_hop;
    Position3D last_position;
    double last_q_watts = 0.0;
    double rx_time_s = 0.0;
    double toa_distance_m = 0.0;          // one-hop: ToA estimate of the latest beacon;
                                          // two-hop: required-range estimate via the relay
    std::optional<int> via_anchor;        // two-hop entries only
};

// Upserts the sender as a one-hop neighbor from a received Wakeup.
void note_wakeup(std::vector<NeighborEntry>& neighbors, const WakeupMsg& msg, double rx_time_s,
                 const ChannelParams& chan);

// Upserts the sender as one-hop and every listed anchor as two-hop (one-hop
// entries dominate; among relays the shorter escalation path wins).
void note_anchor_nbr(std::vector<NeighborEntry>& neighbors, const AnchorNbrMsg& msg,
                     double rx_time_s, const ChannelParams& chan);

enum class TwoHopRule { range, sum };

std::string to_string(TwoHopRule rule);
std::optional<TwoHopRule> parse_two_hop_rule(const std::string& name);

// Power sufficient to reach a two-hop anchor through its relay. Under the
// `range` rule this is power_for_range(d31 + d12), which the triangle
// inequality guarantees to cover the two-hop anchor; the `sum` rule keeps the
// plain sum of the two link powers for comparison. d31 is the sensor->relay
// ToA estimate, d12 the distance between the two anchors' reported positions.
double two_hop_power(const NeighborEntry& one_hop, const NeighborEntry& two_hop,
                     const ChannelParams& chan, TwoHopRule rule);

struct PowerDecision {
    double power_watts = 0.0;
    int n_req = 0;
};

// Request-power selection of a sensor:
//   - enough one-hop anchors: utility argmax over powers that keep at least
//     n_min_req one-hop anchors in range;
//   - too few anchors overall: transmit at p_max and ask for the difference;
//   - otherwise: argmax over one- and two-hop escalation targets, clamped to
//     p_max afterwards.
PowerDecision sensor_choose_power(std::span<const NeighborEntry> neighbors,
                                  const GameParams& gp, const ChannelParams& chan,
                                  TwoHopRule rule);

}  // namespace eela
