#include "eela/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eela {

std::string to_string(Policy p) {
    switch (p) {
        case Policy::eela: return "EELA";
        case Policy::oltc: return "OLTC";
        case Policy::eela_min: return "EELA-Min";
        case Policy::eela_max: return "EELA-Max";
    }
    return "?";
}

std::optional<Policy> parse_policy(const std::string& name) {
    if (name == "EELA") return Policy::eela;
    if (name == "OLTC") return Policy::oltc;
    if (name == "EELA-Min") return Policy::eela_min;
    if (name == "EELA-Max") return Policy::eela_max;
    return std::nullopt;
}

double Scenario::region_diagonal_m() const {
    return std::sqrt(2.0 * region_side_m * region_side_m + region_depth_m * region_depth_m);
}

double Scenario::max_one_way_delay_s() const {
    return region_diagonal_m() / channel.sound_speed_mps;
}

double Scenario::round_length_s() const {
    return timing.request_jitter_s + timing.reply_backoff_s + 4.0 * max_one_way_delay_s() +
           timing.retry_pad_s;
}

double Scenario::round_start_s(int round) const {
    return timing.phase3_start_s + round * round_length_s();
}

double Scenario::reply_window_close_s(int round) const {
    return round_start_s(round) + timing.request_jitter_s + 2.0 * max_one_way_delay_s();
}

void Scenario::finalize() {
    if (n_sensors <= 0) throw ConfigError("n_sensors must be > 0");
    if (n_anchors <= 0) throw ConfigError("n_anchors must be > 0");
    if (!(region_side_m > 0.0) || !(region_depth_m > 0.0)) {
        throw ConfigError("region dimensions must be > 0");
    }
    if (replications <= 0) throw ConfigError("replications must be > 0");
    if (!(horizon_s > 0.0)) throw ConfigError("horizon_s must be > 0");
    if (!(r_ini_m > 0.0) || !(r_min_policy_m > 0.0)) throw ConfigError("ranges must be > 0");

    game.n_sensors = n_sensors;
    game.region_side_m = region_side_m;
    game.q_max_watts = game.p_max_watts;
    field.peak_speed_mps = current_speed_mps;

    channel.r_upper_m = 2.0 * region_diagonal_m();
    if (!p0_explicit) {
        // p0 such that covering the whole region needs exactly p_max.
        channel.p0_watts = 1.0;
        const double tl_diag = attenuation_db(region_diagonal_m(), channel);
        channel.p0_watts = game.p_max_watts / std::pow(10.0, tl_diag / 10.0);
    }
    try {
        channel.validate();
        game.validate();
        field.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    q_ini_watts = power_for_range(r_ini_m, channel);
    fixed_min_power_watts = power_for_range(r_min_policy_m, channel);
    if (!initial_positions.empty() &&
        static_cast<int>(initial_positions.size()) != n_anchors + n_sensors) {
        throw ConfigError("initial_positions must list every anchor then every sensor");
    }
}

namespace {

struct KeyValue {
    std::string key;
    std::string value;
    int line_no;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const KeyValue& kv) {
    try {
        std::size_t used = 0;
        const double v = std::stod(kv.value, &used);
        if (used != kv.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("line " + std::to_string(kv.line_no) + ": bad number for '" + kv.key +
                          "': " + kv.value);
    }
}

long long parse_int(const KeyValue& kv) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(kv.value, &used);
        if (used != kv.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("line " + std::to_string(kv.line_no) + ": bad integer for '" + kv.key +
                          "': " + kv.value);
    }
}

bool apply_key(Scenario& sc, const KeyValue& kv) {
    const std::string& k = kv.key;
    if (k == "region_side_m") sc.region_side_m = parse_double(kv);
    else if (k == "region_depth_m") sc.region_depth_m = parse_double(kv);
    else if (k == "n_sensors") sc.n_sensors = static_cast<int>(parse_int(kv));
    else if (k == "n_anchors") sc.n_anchors = static_cast<int>(parse_int(kv));
    else if (k == "policy") {
        const auto p = parse_policy(kv.value);
        if (!p) throw ConfigError("line " + std::to_string(kv.line_no) + ": unknown policy '" +
                                  kv.value + "'");
        sc.policy = *p;
    } else if (k == "current_speed_mps") {
        const double v = parse_double(kv);
        if (v != 2.0 && v != 3.0 && v != 4.0) {
            throw ConfigError("line " + std::to_string(kv.line_no) +
                              ": current_speed_mps must be one of 2, 3, 4");
        }
        sc.current_speed_mps = v;
    } else if (k == "replications") sc.replications = static_cast<int>(parse_int(kv));
    else if (k == "seed") sc.seed = static_cast<std::uint64_t>(parse_int(kv));
    else if (k == "horizon_s") sc.horizon_s = parse_double(kv);
    else if (k == "frequency_khz") sc.channel.frequency_khz = parse_double(kv);
    else if (k == "spreading_k") sc.channel.spreading_k = parse_double(kv);
    else if (k == "a_norm") sc.channel.a_norm = parse_double(kv);
    else if (k == "sound_speed_mps") sc.channel.sound_speed_mps = parse_double(kv);
    else if (k == "min_range_m") sc.channel.min_range_m = parse_double(kv);
    else if (k == "p_max_watts") sc.game.p_max_watts = parse_double(kv);
    else if (k == "p0_watts") {
        sc.channel.p0_watts = parse_double(kv);
        sc.p0_explicit = true;
    } else if (k == "w1_anchor") sc.game.w1_anchor = parse_double(kv);
    else if (k == "w2_anchor") sc.game.w2_anchor = parse_double(kv);
    else if (k == "w1_sensor") sc.game.w1_sensor = parse_double(kv);
    else if (k == "w2_sensor") sc.game.w2_sensor = parse_double(kv);
    else if (k == "cost_per_unit_power_anchor") sc.game.cost_per_unit_power_anchor = parse_double(kv);
    else if (k == "cost_per_unit_power_sensor") sc.game.cost_per_unit_power_sensor = parse_double(kv);
    else if (k == "total_energy_anchor") sc.game.total_energy_anchor = parse_double(kv);
    else if (k == "total_energy_sensor") sc.game.total_energy_sensor = parse_double(kv);
    else if (k == "n_min_req") sc.game.n_min_req = static_cast<int>(parse_int(kv));
    else if (k == "meander_wavelength_m") sc.field.meander_wavelength_m = parse_double(kv);
    else if (k == "meander_amplitude_m") sc.field.meander_amplitude_m = parse_double(kv);
    else if (k == "phase_speed_mps") sc.field.phase_speed_mps = parse_double(kv);
    else if (k == "r_ini_m") sc.r_ini_m = parse_double(kv);
    else if (k == "r_min_policy_m") sc.r_min_policy_m = parse_double(kv);
    else if (k == "wakeup_jitter_s") sc.timing.wakeup_jitter_s = parse_double(kv);
    else if (k == "phase2_start_s") sc.timing.phase2_start_s = parse_double(kv);
    else if (k == "phase3_start_s") sc.timing.phase3_start_s = parse_double(kv);
    else if (k == "request_jitter_s") sc.timing.request_jitter_s = parse_double(kv);
    else if (k == "reply_backoff_s") sc.timing.reply_backoff_s = parse_double(kv);
    else if (k == "retry_pad_s") sc.timing.retry_pad_s = parse_double(kv);
    else if (k == "max_retries") sc.timing.max_retries = static_cast<int>(parse_int(kv));
    else if (k == "mobility_dt_s") sc.timing.mobility_dt_s = parse_double(kv);
    else if (k == "twohop_power_rule") {
        const auto r = parse_two_hop_rule(kv.value);
        if (!r) throw ConfigError("line " + std::to_string(kv.line_no) +
                                  ": twohop_power_rule must be 'range' or 'sum'");
        sc.twohop_rule = *r;
    } else if (k == "energy_denominator") {
        if (kv.value == "localized") sc.energy_denominator = EnergyDenominator::localized;
        else if (kv.value == "all") sc.energy_denominator = EnergyDenominator::all;
        else throw ConfigError("line " + std::to_string(kv.line_no) +
                               ": energy_denominator must be 'localized' or 'all'");
    } else if (k == "rx_idle_power_w") sc.rx_idle_power_w = parse_double(kv);
    else if (k == "sleep_power_w") sc.sleep_power_w = parse_double(kv);
    else if (k == "data_rate_bps") sc.data_rate_bps = parse_double(kv);
    else return false;
    return true;
}

}  // namespace

Scenario load_scenario_text(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (kv.key.empty() || kv.value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        if (!apply_key(sc, kv)) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + kv.key +
                              "'");
        }
    }
    sc.finalize();
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario_text(buf.str());
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string scenario_to_config_text(const Scenario& sc) {
    std::ostringstream out;
    out << "region_side_m = " << fmt(sc.region_side_m) << "\n";
    out << "region_depth_m = " << fmt(sc.region_depth_m) << "\n";
    out << "n_sensors = " << sc.n_sensors << "\n";
    out << "n_anchors = " << sc.n_anchors << "\n";
    out << "policy = " << to_string(sc.policy) << "\n";
    out << "current_speed_mps = " << fmt(sc.current_speed_mps) << "\n";
    out << "replications = " << sc.replications << "\n";
    out << "seed = " << sc.seed << "\n";
    out << "horizon_s = " << fmt(sc.horizon_s) << "\n";
    out << "frequency_khz = " << fmt(sc.channel.frequency_khz) << "\n";
    out << "spreading_k = " << fmt(sc.channel.spreading_k) << "\n";
    out << "a_norm = " << fmt(sc.channel.a_norm) << "\n";
    out << "sound_speed_mps = " << fmt(sc.channel.sound_speed_mps) << "\n";
    out << "min_range_m = " << fmt(sc.channel.min_range_m) << "\n";
    out << "p_max_watts = " << fmt(sc.game.p_max_watts) << "\n";
    out << "p0_watts = " << fmt(sc.channel.p0_watts) << "\n";
    out << "w1_anchor = " << fmt(sc.game.w1_anchor) << "\n";
    out << "w2_anchor = " << fmt(sc.game.w2_anchor) << "\n";
    out << "w1_sensor = " << fmt(sc.game.w1_sensor) << "\n";
    out << "w2_sensor = " << fmt(sc.game.w2_sensor) << "\n";
    out << "cost_per_unit_power_anchor = " << fmt(sc.game.cost_per_unit_power_anchor) << "\n";
    out << "cost_per_unit_power_sensor = " << fmt(sc.game.cost_per_unit_power_sensor) << "\n";
    out << "total_energy_anchor = " << fmt(sc.game.total_energy_anchor) << "\n";
    out << "total_energy_sensor = " << fmt(sc.game.total_energy_sensor) << "\n";
    out << "n_min_req = " << sc.game.n_min_req << "\n";
    out << "meander_wavelength_m = " << fmt(sc.field.meander_wavelength_m) << "\n";
    out << "meander_amplitude_m = " << fmt(sc.field.meander_amplitude_m) << "\n";
    out << "phase_speed_mps = " << fmt(sc.field.phase_speed_mps) << "\n";
    out << "r_ini_m = " << fmt(sc.r_ini_m) << "\n";
    out << "r_min_policy_m = " << fmt(sc.r_min_policy_m) << "\n";
    out << "wakeup_jitter_s = " << fmt(sc.timing.wakeup_jitter_s) << "\n";
    out << "phase2_start_s = " << fmt(sc.timing.phase2_start_s) << "\n";
    out << "phase3_start_s = " << fmt(sc.timing.phase3_start_s) << "\n";
    out << "request_jitter_s = " << fmt(sc.timing.request_jitter_s) << "\n";
    out << "reply_backoff_s = " << fmt(sc.timing.reply_backoff_s) << "\n";
    out << "retry_pad_s = " << fmt(sc.timing.retry_pad_s) << "\n";
    out << "max_retries = " << sc.timing.max_retries << "\n";
    out << "mobility_dt_s = " << fmt(sc.timing.mobility_dt_s) << "\n";
    out << "twohop_power_rule = " << to_string(sc.twohop_rule) << "\n";
    out << "energy_denominator = "
        << (sc.energy_denominator == EnergyDenominator::localized ? "localized" : "all") << "\n";
    out << "rx_idle_power_w = " << fmt(sc.rx_idle_power_w) << "\n";
    out << "sleep_power_w = " << fmt(sc.sleep_power_w) << "\n";
    out << "data_rate_bps = " << fmt(sc.data_rate_bps) << "\n";
    return out.str();
}

}  // namespace eela
