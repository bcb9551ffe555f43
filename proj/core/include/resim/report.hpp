#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "resim/metrics.hpp"
#include "resim/scenario.hpp"
#include "resim/trace.hpp"

namespace resim {

/// Post-hoc summary of one run.
struct RunReport {
  std::string scenario_name;
  Mode mode = Mode::Sync;
  SafetyInterval interval;
  /// Delayed runs only: the interval upper endpoint recomputed with every
  /// agent's initial velocity included, kept as a diagnostic because summing
  /// over normal agents alone and over all agents give different numbers on
  /// the stock example data.
  std::optional<double> interval_hi_all_velocities;
  SafetyCheck safety;
  ConsensusVerdict consensus;
  RateEstimate rate;
  bool envelopes_are_monotone = false;
  /// Smallest nonzero entry of the realized two-step update matrices along
  /// the run (synchronous runs only).
  std::optional<double> realized_beta;
  bool aborted = false;
  std::string abort_reason;
};

RunReport analyze_run(const Scenario& sc, const Trace& t);

nlohmann::json report_to_json(const RunReport& r);

/// Effective interaction graph at one recorded step: the scenario graph with
/// every weight dropped by that step's filter decisions zeroed.
Digraph effective_graph(const Scenario& sc, const Trace& t, long k);

struct RunOutputs {
  std::string trace_csv;
  std::string edge_log_csv;
  std::string report_json;
  std::string plot_script;
};

/// Writes <name>_trace.csv, <name>_edges.csv, <name>_report.json and
/// <name>_plot.py under out_dir.
RunOutputs write_run_outputs(const Scenario& sc, const Trace& t, const RunReport& r,
                             const std::string& out_dir);

}  // namespace resim
