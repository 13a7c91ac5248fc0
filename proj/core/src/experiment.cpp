#include "eela/experiment.hpp"

#include <cstdio>

#include "eela/engine.hpp"
#include "eela/rng.hpp"

namespace eela {

MetricsReport run_experiment(const Scenario& sc, std::ostream* trace) {
    std::vector<RunMetrics> rows;
    rows.reserve(sc.replications);
    for (int rep = 0; rep < sc.replications; ++rep) {
        if (trace != nullptr) *trace << "# replication " << rep << "\n";
        const RunResult result = simulate_run(sc, derive_seed(sc.seed, rep), trace);
        rows.push_back(compute_metrics(result, sc));
    }
    return aggregate_metrics(std::move(rows));
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::sensors: return "sensors";
        case SweepAxis::speed: return "speed";
        case SweepAxis::policy: return "policy";
    }
    return "?";
}

std::optional<SweepAxis> parse_sweep_axis(const std::string& name) {
    if (name == "sensors") return SweepAxis::sensors;
    if (name == "speed") return SweepAxis::speed;
    if (name == "policy") return SweepAxis::policy;
    return std::nullopt;
}

namespace {

constexpr Policy kAllPolicies[] = {Policy::eela, Policy::oltc, Policy::eela_min,
                                   Policy::eela_max};

SweepRow run_point(Scenario sc, double axis_value, const std::string& label, Policy policy) {
    sc.policy = policy;
    sc.finalize();
    SweepRow row;
    row.axis_value = axis_value;
    row.axis_label = label;
    row.policy = policy;
    row.report = run_experiment(sc);
    return row;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string cell(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
}

}  // namespace

std::vector<SweepRow> sweep(const Scenario& base, SweepAxis axis) {
    std::vector<SweepRow> rows;
    switch (axis) {
        case SweepAxis::sensors:
            for (int n = 10; n <= 50; n += 10) {
                for (Policy p : kAllPolicies) {
                    Scenario sc = base;
                    sc.n_sensors = n;
                    rows.push_back(run_point(sc, n, std::to_string(n), p));
                }
            }
            break;
        case SweepAxis::speed:
            for (double v : {2.0, 3.0, 4.0}) {
                Scenario sc = base;
                sc.current_speed_mps = v;
                rows.push_back(run_point(sc, v, fmt(v), base.policy));
            }
            break;
        case SweepAxis::policy:
            for (Policy p : kAllPolicies) {
                rows.push_back(run_point(base, 0.0, to_string(p), p));
            }
            break;
    }
    return rows;
}

void write_report_csv(std::ostream& out, const MetricsReport& report) {
    out << "replication,coverage,e_sensor_j,e_anchor_j,e_node_j,ale_m,ald_s,localized,sensors\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const RunMetrics& r = report.rows[i];
        out << i << ',' << fmt(r.coverage) << ',' << cell(r.avg_energy_sensor_j) << ','
            << fmt(r.avg_energy_anchor_j) << ',' << fmt(r.avg_energy_node_j) << ','
            << cell(r.avg_loc_error_m) << ',' << cell(r.avg_loc_delay_s) << ',' << r.localized
            << ',' << r.sensors << '\n';
    }
    out << "mean," << fmt(report.coverage.mean) << ',' << fmt(report.e_sensor.mean) << ','
        << fmt(report.e_anchor.mean) << ',' << fmt(report.e_node.mean) << ','
        << fmt(report.ale_m.mean) << ',' << fmt(report.ald_s.mean) << ",,\n";
    out << "stddev," << fmt(report.coverage.stddev) << ',' << fmt(report.e_sensor.stddev) << ','
        << fmt(report.e_anchor.stddev) << ',' << fmt(report.e_node.stddev) << ','
        << fmt(report.ale_m.stddev) << ',' << fmt(report.ald_s.stddev) << ",,\n";
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "axis,policy,coverage,e_sensor_j,e_anchor_j,e_node_j,ale_m,ald_s,"
           "coverage_sd,e_sensor_sd,e_anchor_sd,e_node_sd,ale_sd,ald_sd\n";
    for (const SweepRow& row : rows) {
        const MetricsReport& r = row.report;
        out << row.axis_label << ',' << to_string(row.policy) << ',' << fmt(r.coverage.mean)
            << ',' << fmt(r.e_sensor.mean) << ',' << fmt(r.e_anchor.mean) << ','
            << fmt(r.e_node.mean) << ',' << fmt(r.ale_m.mean) << ',' << fmt(r.ald_s.mean) << ','
            << fmt(r.coverage.stddev) << ',' << fmt(r.e_sensor.stddev) << ','
            << fmt(r.e_anchor.stddev) << ',' << fmt(r.e_node.stddev) << ','
            << fmt(r.ale_m.stddev) << ',' << fmt(r.ald_s.stddev) << '\n';
    }
}

}  // namespace eela
