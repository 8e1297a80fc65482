#pragma once

#include <json.hpp>

#include "analysis.hpp"
#include "scenarios.hpp"
#include "sim.hpp"

namespace pnfbar {

// A fully validated, runnable scenario assembled from a config file.
struct BuiltScenario {
    PlantModel plant;
    ControllerParams params;
    Eigen::VectorXd x0;
    SimConfig sim;
    double M = 0.0;      // analysis-side truth, never read by the controller
    double eps_b = 0.0;
    std::optional<FurutaReduction> furuta;
    nlohmann::json config_json; // normalized snapshot
};

nlohmann::json load_config(const std::string& path);

Signal signal_from_json(const nlohmann::json& j);
nlohmann::json signal_to_json(const Signal& s);

// Optional overrides support parameter sweeps over the same base config.
struct ScenarioOverrides {
    std::optional<double> epsilon;
    std::optional<double> T;
    std::optional<Eigen::VectorXd> x0;
    std::optional<double> M; // rescales the matched perturbation (raw_chain)
};

BuiltScenario build_scenario(const nlohmann::json& cfg, const ScenarioOverrides& ov = {});

// Runs the scenario and writes the trace (plus metadata sidecar) to
// csv_path. On an invariant abort the trace prefix is still written and the
// error is rethrown.
Trace run_config(const nlohmann::json& cfg, const std::string& csv_path);

struct SweepRow {
    std::string label;
    double T1 = 0.0;
    double sup_V_after_T1 = 0.0;
    double max_Lambda = 0.0;
    std::string trace_path;
};
std::vector<SweepRow> sweep_config(const nlohmann::json& cfg, const std::string& out_dir);
std::string sweep_table_text(const std::vector<SweepRow>& rows);

std::string bounds_text(const nlohmann::json& cfg);

struct TraceCheckResult {
    bool ok = true;
    std::string report;
};
// Re-validates controller/trace invariants on a stored trace, including the
// scaled-time consistency of the reaching phase.
TraceCheckResult check_trace_file(const std::string& csv_path);

} // namespace pnfbar
