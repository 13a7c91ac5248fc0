#include "eela/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace eela {

RunMetrics compute_metrics(const RunResult& result, const Scenario& sc) {
    RunMetrics m;
    m.sensors = static_cast<int>(result.sensors.size());
    if (m.sensors == 0) throw std::invalid_argument("compute_metrics: run has no sensors");

    double sensor_energy_total = 0.0;
    double sensor_energy_localized = 0.0;
    double anchor_energy_total = 0.0;
    int anchors = 0;
    for (std::size_t i = 0; i < result.roles.size(); ++i) {
        if (result.roles[i] == NodeRole::anchor) {
            anchor_energy_total += result.ledgers[i].total();
            ++anchors;
        } else {
            sensor_energy_total += result.ledgers[i].total();
        }
    }

    double error_sum = 0.0;
    double delay_sum = 0.0;
    for (const SensorOutcome& s : result.sensors) {
        if (!s.localized) continue;
        ++m.localized;
        error_sum += s.error_m;
        delay_sum += s.localized_at_s - s.first_request_s;
        sensor_energy_localized += result.ledgers[s.node_id].total();
    }

    m.coverage = static_cast<double>(m.localized) / m.sensors;
    if (sc.energy_denominator == EnergyDenominator::localized) {
        if (m.localized > 0) m.avg_energy_sensor_j = sensor_energy_localized / m.localized;
    } else {
        m.avg_energy_sensor_j = sensor_energy_total / m.sensors;
    }
    m.avg_energy_anchor_j = anchors > 0 ? anchor_energy_total / anchors : 0.0;
    m.avg_energy_node_j = (sensor_energy_total + anchor_energy_total) / (m.sensors + anchors);
    if (m.localized > 0) {
        m.avg_loc_error_m = error_sum / m.localized;
        m.avg_loc_delay_s = delay_sum / m.localized;
    }
    return m;
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.count = static_cast<int>(values.size());
    if (s.count == 0) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.count;
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / (s.count - 1));
    }
    return s;
}

}  // namespace

MetricsReport aggregate_metrics(std::vector<RunMetrics> rows) {
    MetricsReport rep;
    std::vector<double> coverage, e_sensor, e_anchor, e_node, ale, ald;
    for (const RunMetrics& r : rows) {
        coverage.push_back(r.coverage);
        if (r.avg_energy_sensor_j) e_sensor.push_back(*r.avg_energy_sensor_j);
        e_anchor.push_back(r.avg_energy_anchor_j);
        e_node.push_back(r.avg_energy_node_j);
        if (r.avg_loc_error_m) ale.push_back(*r.avg_loc_error_m);
        if (r.avg_loc_delay_s) ald.push_back(*r.avg_loc_delay_s);
    }
    rep.coverage = summarize(coverage);
    rep.e_sensor = summarize(e_sensor);
    rep.e_anchor = summarize(e_anchor);
    rep.e_node = summarize(e_node);
    rep.ale_m = summarize(ale);
    rep.ald_s = summarize(ald);
    rep.rows = std::move(rows);
    return rep;
}

}  // namespace eela
