#include "eela/game.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace eela {

void GameParams::validate() const {
    auto check_pair = [](double w1, double w2, const char* who) {
        if (!(w1 > 0.0 && w1 < 1.0 && w2 > 0.0 && w2 < 1.0)) {
            throw std::invalid_argument(std::string(who) + " weights must lie in (0,1)");
        }
        if (std::abs(w1 + w2 - 1.0) > 1e-12) {
            throw std::invalid_argument(std::string(who) + " weights must sum to 1");
        }
    };
    check_pair(w1_anchor, w2_anchor, "anchor");
    check_pair(w1_sensor, w2_sensor, "sensor");
    if (!(cost_per_unit_power_anchor > 0.0) || !(cost_per_unit_power_sensor > 0.0)) {
        throw std::invalid_argument("cost per unit power must be > 0");
    }
    if (!(total_energy_anchor > 0.0) || !(total_energy_sensor > 0.0)) {
        throw std::invalid_argument("total energies must be > 0");
    }
    if (n_sensors <= 0) throw std::invalid_argument("n_sensors must be > 0");
    if (!(region_side_m > 0.0)) throw std::invalid_argument("region_side_m must be > 0");
    if (n_min_req <= 0) throw std::invalid_argument("n_min_req must be > 0");
    if (!(p_max_watts > 0.0) || !(q_max_watts > 0.0)) {
        throw std::invalid_argument("power bounds must be > 0");
    }
    if (std::abs(p_max_watts - q_max_watts) > 1e-12 * p_max_watts) {
        throw std::invalid_argument("p_max_watts and q_max_watts must be equal");
    }
}

double FollowerObservation::sum_power() const {
    return std::accumulate(request_powers_watts.begin(), request_powers_watts.end(), 0.0);
}

int FollowerObservation::sum_req() const {
    return std::accumulate(req_counts.begin(), req_counts.end(), 0);
}

double LeaderObservation::sum_power() const {
    return std::accumulate(reply_powers_watts.begin(), reply_powers_watts.end(), 0.0);
}

int required_anchors(int n_min_req, int visible) {
    return std::max(n_min_req - visible, 0);
}

namespace {

double density_coeff(const GameParams& gp) {
    const double d3 = gp.region_side_m * gp.region_side_m * gp.region_side_m;
    return 4.0 * std::numbers::pi * gp.n_sensors / (3.0 * d3);
}

}  // namespace

double handled_requests(double q_watts, const GameParams& gp, const ChannelParams& chan) {
    const double r = range_for_power(q_watts, chan);
    return std::min(density_coeff(gp) * r * r * r, static_cast<double>(gp.n_sensors));
}

double handled_requests_slope(double q_watts, const GameParams& gp, const ChannelParams& chan) {
    const double r = range_for_power(q_watts, chan);
    if (density_coeff(gp) * r * r * r >= static_cast<double>(gp.n_sensors)) return 0.0;
    return 3.0 * density_coeff(gp) * r * r / power_slope(r, chan);
}

LeaderObservation density_leader_observation(std::vector<double> reply_powers,
                                             const GameParams& gp, const ChannelParams& chan) {
    LeaderObservation obs;
    obs.reply_powers_watts = std::move(reply_powers);
    obs.neighbor_count = [gp, chan](double p) { return handled_requests(p, gp, chan); };
    obs.neighbor_count_derivative = [gp, chan](double p) {
        return handled_requests_slope(p, gp, chan);
    };
    return obs;
}

double follower_utility(double q_watts, const FollowerObservation& obs, const GameParams& gp,
                        const ChannelParams& chan) {
    if (!(q_watts > 0.0)) throw std::invalid_argument("follower_utility: power must be > 0");
    if (obs.n_arx() < 1) throw std::invalid_argument("follower_utility: empty observation");
    const double e_tl = gp.total_energy_anchor;
    const double energy_term = (e_tl - gp.cost_per_unit_power_anchor * q_watts) / e_tl;
    const double n_hd = handled_requests(q_watts, gp, chan);
    double ability = n_hd / obs.n_arx();
    const int sum_req = obs.sum_req();
    if (sum_req > 0) ability += n_hd / sum_req;  // all requesters satisfied: term omitted
    ability -= obs.sum_power() / q_watts;
    return gp.w1_anchor * energy_term + gp.w2_anchor * ability;
}

double leader_utility(double p_watts, const LeaderObservation& obs, const GameParams& gp,
                      const ChannelParams& chan) {
    (void)chan;
    if (!(p_watts > 0.0)) throw std::invalid_argument("leader_utility: power must be > 0");
    if (obs.n_srx() < 1) throw std::invalid_argument("leader_utility: empty observation");
    const double e_tl = gp.total_energy_sensor;
    const double energy_term = (e_tl - gp.cost_per_unit_power_sensor * p_watts) / e_tl;
    const double ability =
        obs.neighbor_count(p_watts) / obs.n_srx() - obs.sum_power() / p_watts;
    return gp.w1_sensor * energy_term + gp.w2_sensor * ability;
}

std::optional<double> follower_fixed_point_step(double q_watts, const FollowerObservation& obs,
                                                const GameParams& gp, const ChannelParams& chan) {
    double coef = 1.0 / obs.n_arx();
    if (obs.sum_req() > 0) coef += 1.0 / obs.sum_req();
    const double denom = gp.w1_anchor * gp.cost_per_unit_power_anchor -
                         gp.w2_anchor * gp.total_energy_anchor * coef *
                             handled_requests_slope(q_watts, gp, chan);
    if (!(denom > 0.0)) return std::nullopt;
    return std::sqrt(gp.w2_anchor * gp.total_energy_anchor * obs.sum_power() / denom);
}

std::optional<double> leader_fixed_point_step(double p_watts, const LeaderObservation& obs,
                                              const GameParams& gp, const ChannelParams& chan) {
    (void)chan;
    const double slope =
        obs.neighbor_count_derivative ? obs.neighbor_count_derivative(p_watts) : 0.0;
    const double denom = gp.w1_sensor * gp.cost_per_unit_power_sensor -
                         gp.w2_sensor * gp.total_energy_sensor * slope / obs.n_srx();
    if (!(denom > 0.0)) return std::nullopt;
    return std::sqrt(gp.w2_sensor * gp.total_energy_sensor * obs.sum_power() / denom);
}

namespace {

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Cheap sanity scan: is the candidate value at least as good as every point
// of a coarse grid?
bool beats_coarse_grid(const std::function<double(double)>& f, double fx, double lo, double hi) {
    constexpr int kPoints = 64;
    const double tol = 1e-9 * (1.0 + std::abs(fx));
    for (int i = 0; i < kPoints; ++i) {
        const double p = lo + (hi - lo) * i / (kPoints - 1);
        if (f(p) > fx + tol) return false;
    }
    return true;
}

struct SolveSpec {
    std::function<double(double)> utility;
    std::function<std::optional<double>(double)> step;
    double sum_observed;
    double lo;
    double hi;
};

double solve_best_response(const SolveSpec& s, int* fallback_count) {
    if (s.sum_observed <= 0.0) return s.lo;  // zero numerator: floor power
    bool feasible = true;
    bool converged = false;
    double q = s.hi;
    for (int it = 0; it < 100; ++it) {
        const std::optional<double> next = s.step(q);
        if (!next) {
            feasible = false;
            break;
        }
        const double blended = std::clamp(0.5 * (q + *next), s.lo, s.hi);
        if (std::abs(blended - q) <= 1e-8 * std::max(blended, s.lo)) {
            q = blended;
            converged = true;
            break;
        }
        q = blended;
    }
    if (feasible && converged && beats_coarse_grid(s.utility, s.utility(q), s.lo, s.hi)) {
        return q;
    }
    if (fallback_count) ++*fallback_count;
    const GridMax gm = grid_argmax(s.utility, s.lo, s.hi, 1024);
    return gm.x;
}

}  // namespace

GridMax grid_argmax(const std::function<double(double)>& f, double lo, double hi, int n_points) {
    if (n_points < 2 || !(hi > lo)) return {lo, f(lo)};
    double best_x = lo;
    double best_v = f(lo);
    const double step = (hi - lo) / (n_points - 1);
    for (int i = 1; i < n_points; ++i) {
        const double x = lo + step * i;
        const double v = f(x);
        if (v > best_v) {  // ties keep the lower power
            best_v = v;
            best_x = x;
        }
    }
    const double a = std::max(lo, best_x - step);
    const double b = std::min(hi, best_x + step);
    const double refined = golden_max(f, a, b);
    const double rv = f(refined);
    if (rv > best_v) return {refined, rv};
    return {best_x, best_v};
}

std::optional<double> follower_best_response(const FollowerObservation& obs, const GameParams& gp,
                                             const ChannelParams& chan, int* fallback_count) {
    if (obs.n_arx() < 1) return std::nullopt;
    SolveSpec s;
    s.utility = [&](double q) { return follower_utility(q, obs, gp, chan); };
    s.step = [&](double q) { return follower_fixed_point_step(q, obs, gp, chan); };
    s.sum_observed = obs.sum_power();
    s.lo = power_floor(chan);
    s.hi = gp.q_max_watts;
    return solve_best_response(s, fallback_count);
}

std::optional<double> leader_best_response(const LeaderObservation& obs, const GameParams& gp,
                                           const ChannelParams& chan, int* fallback_count) {
    if (obs.n_srx() < 1) return std::nullopt;
    SolveSpec s;
    s.utility = [&](double p) { return leader_utility(p, obs, gp, chan); };
    s.step = [&](double p) { return leader_fixed_point_step(p, obs, gp, chan); };
    s.sum_observed = obs.sum_power();
    s.lo = power_floor(chan);
    s.hi = gp.p_max_watts;
    return solve_best_response(s, fallback_count);
}

bool verify_equilibrium(double sensor_power, std::span<const double> anchor_powers,
                        const LeaderObservation& leader_obs,
                        std::span<const FollowerObservation> follower_obs, const GameParams& gp,
                        const ChannelParams& chan, double epsilon) {
    if (anchor_powers.size() != follower_obs.size()) {
        throw std::invalid_argument("verify_equilibrium: one observation per anchor required");
    }
    constexpr int kGrid = 1024;
    const double floor = power_floor(chan);

    auto improvable = [&](const std::function<double(double)>& u, double current, double hi) {
        const double here = u(current);
        const double tol = epsilon * std::max(std::abs(here), 1e-12);
        for (int i = 0; i < kGrid; ++i) {
            const double p = floor + (hi - floor) * i / (kGrid - 1);
            if (u(p) > here + tol) return true;
        }
        return false;
    };

    if (improvable([&](double p) { return leader_utility(p, leader_obs, gp, chan); },
                   sensor_power, gp.p_max_watts)) {
        return false;
    }
    for (std::size_t j = 0; j < follower_obs.size(); ++j) {
        if (improvable(
                [&](double q) { return follower_utility(q, follower_obs[j], gp, chan); },
                anchor_powers[j], gp.q_max_watts)) {
            return false;
        }
    }
    return true;
}

}  // namespace eela
