#pragma once

#include <optional>
#include <vector>

#include "eela/engine.hpp"
#include "eela/scenario.hpp"

namespace eela {

// Per-run metrics. ALE and ALD are absent (not zero) when no sensor was
// localized in the run.
struct RunMetrics {
    double coverage = 0.0;
    std::optional<double> avg_energy_sensor_j;  // absent when its denominator is empty
    double avg_energy_anchor_j = 0.0;
    double avg_energy_node_j = 0.0;
    std::optional<double> avg_loc_error_m;
    std::optional<double> avg_loc_delay_s;
    int localized = 0;
    int sensors = 0;
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
    int count = 0;
};

struct MetricsReport {
    std::vector<RunMetrics> rows;  // one per replication, in replication order
    MetricSummary coverage;
    MetricSummary e_sensor;
    MetricSummary e_anchor;
    MetricSummary e_node;
    MetricSummary ale_m;
    MetricSummary ald_s;
};

// Coverage, per-class energy means, localization error and delay for one run.
// The sensor-energy denominator follows the scenario's energy_denominator
// flag (localized sensors by default).
RunMetrics compute_metrics(const RunResult& result, const Scenario& sc);

MetricsReport aggregate_metrics(std::vector<RunMetrics> rows);

}  // namespace eela
