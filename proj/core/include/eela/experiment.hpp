#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eela/metrics.hpp"
#include "eela/scenario.hpp"

namespace eela {

// Runs `replications` independent seeded runs of the scenario and aggregates
// them. Replication r uses the sub-seed derive_seed(scenario.seed, r), so the
// deployments for a given r are shared across policies and current speeds.
// The optional trace stream receives every run's records, separated by
// `# replication <r>` comment lines.
MetricsReport run_experiment(const Scenario& sc, std::ostream* trace = nullptr);

enum class SweepAxis { sensors, speed, policy };

std::string to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(const std::string& name);

struct SweepRow {
    double axis_value = 0.0;      // sensor count or current speed
    std::string axis_label;
    Policy policy = Policy::eela;
    MetricsReport report;
};

// sensors: 10..50 step 10, all four policies; speed: {2,3,4} m/s with the
// base policy; policy: all four policies at the base scenario.
std::vector<SweepRow> sweep(const Scenario& base, SweepAxis axis);

// CSV writers. Column order is stable; absent values print as empty cells.
void write_report_csv(std::ostream& out, const MetricsReport& report);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace eela
