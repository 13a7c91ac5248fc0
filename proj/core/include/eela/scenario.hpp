#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eela/acoustics.hpp"
#include "eela/game.hpp"
#include "eela/geometry.hpp"
#include "eela/mobility.hpp"
#include "eela/protocol.hpp"

namespace eela {

enum class Policy { eela, oltc, eela_min, eela_max };

std::string to_string(Policy p);
std::optional<Policy> parse_policy(const std::string& name);

enum class EnergyDenominator { localized, all };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Protocol schedule. Rounds repeat every
//   request_jitter + reply_backoff + 4 * (max one-way delay) + retry_pad
// seconds: sensors jitter their requests over [0, request_jitter], anchors
// close their collection window one max round-trip after the last possible
// request, and replies leave within the backoff.
struct ProtocolTiming {
    double wakeup_jitter_s = 4.0;
    double phase2_start_s = 8.0;
    double phase3_start_s = 16.0;
    double request_jitter_s = 5.0;
    double reply_backoff_s = 7.0;
    double retry_pad_s = 1.0;
    int max_retries = 3;
    double mobility_dt_s = 0.1;
};

struct Scenario {
    double region_side_m = 2500.0;
    double region_depth_m = 2500.0;
    int n_sensors = 50;
    int n_anchors = 4;
    Policy policy = Policy::eela;
    double current_speed_mps = 2.0;
    GameParams game;
    ChannelParams channel;
    CurrentField field;
    ProtocolTiming timing;
    TwoHopRule twohop_rule = TwoHopRule::range;
    EnergyDenominator energy_denominator = EnergyDenominator::localized;
    double r_ini_m = 3900.0;        // beacon range of anchors (wakeup / anchornbr)
    double r_min_policy_m = 1000.0; // fixed range of the Min baseline
    int replications = 100;
    std::uint64_t seed = 1;
    double horizon_s = 120.0;
    double rx_idle_power_w = 0.1;
    double sleep_power_w = 1e-4;
    double data_rate_bps = 500.0;

    // Derived at finalize(); the channel's p0 is calibrated so that
    // power_for_range(region diagonal) equals p_max, unless p0 was set
    // explicitly (config key p0_watts or p0_explicit flag).
    bool p0_explicit = false;
    double q_ini_watts = 0.0;
    double fixed_min_power_watts = 0.0;

    // Test hook: explicit initial positions (anchors first, then sensors).
    std::vector<Position3D> initial_positions;

    double region_diagonal_m() const;
    double max_one_way_delay_s() const;
    double round_length_s() const;
    double round_start_s(int round) const;
    double reply_window_close_s(int round) const;

    // Calibrates derived quantities and validates. Idempotent.
    void finalize();
};

// Flat key-value configuration: one `key = value` per line, `#` comments.
// Unknown keys are errors.
Scenario load_scenario_file(const std::string& path);
Scenario load_scenario_text(const std::string& text);

// Writes every configurable key with its current value.
std::string scenario_to_config_text(const Scenario& sc);

}  // namespace eela
