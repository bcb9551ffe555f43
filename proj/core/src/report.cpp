#include "resim/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "resim/dynamics.hpp"
#include "resim/errors.hpp"

namespace resim {

using nlohmann::json;

Digraph effective_graph(const Scenario& sc, const Trace& t, long k) {
  const auto& rec = t.steps.at(static_cast<std::size_t>(k));
  if (rec.filters.empty())
    throw std::invalid_argument("effective_graph: step " + std::to_string(k) +
                                " carries no filter decisions");
  Digraph g(sc.params.n, sc.graph.gamma());
  for (int i = 0; i < sc.params.n; ++i) {
    const FilterDecision& fd = rec.filters[i];
    if (fd.agent < 0) continue;  // malicious row
    for (int j : fd.kept) g.add_edge(j, i, sc.graph.weight(j, i));
  }
  return g;
}

namespace {

std::optional<double> realized_beta_sync(const Scenario& sc, const Trace& t) {
  const long h = t.horizon();
  if (h < 2) return std::nullopt;
  const auto normal = sc.normal_set();
  double beta = std::numeric_limits<double>::infinity();
  Digraph prev = effective_graph(sc, t, 0);
  for (long k = 1; k + 1 <= h; ++k) {
    Digraph cur = effective_graph(sc, t, k);
    auto [phi1, phi2] = phi_matrices(cur, prev, sc.params, sc.adversary.malicious);
    for (int i : normal)
      for (int c = 0; c < phi1.cols(); ++c) {
        if (phi1(i, c) > 0.0) beta = std::min(beta, phi1(i, c));
        if (phi2(i, c) > 0.0) beta = std::min(beta, phi2(i, c));
      }
    prev = std::move(cur);
  }
  if (!std::isfinite(beta)) return std::nullopt;
  return beta;
}

}  // namespace

RunReport analyze_run(const Scenario& sc, const Trace& t) {
  RunReport r;
  r.scenario_name = sc.name;
  r.mode = sc.mode;
  r.aborted = t.aborted;
  r.abort_reason = t.abort_reason;

  const auto normal = sc.normal_set();
  const NetworkState s0 = sc.initial_state();

  if (sc.mode == Mode::Sync) {
    r.interval = safety_interval_sync(s0, sc.params, normal);
  } else {
    std::vector<std::vector<double>> z0;
    z0.push_back(sc.x0);
    for (const auto& row : sc.history) z0.push_back(row);
    // flat pre-fill up to tau slots
    while (static_cast<int>(z0.size()) < sc.tau + 1) z0.push_back(z0.back());
    r.interval = safety_interval_async(z0, sc.v0, sc.params, normal);

    const double c = sc.params.T - sc.params.alpha * sc.params.T * sc.params.T / 2.0;
    double max_x = -std::numeric_limits<double>::infinity();
    for (const auto& row : z0)
      for (int i : normal) max_x = std::max(max_x, row[i]);
    double max_v = 0.0;
    for (int i = 0; i < sc.params.n; ++i) max_v = std::max(max_v, c * sc.v0[i]);
    r.interval_hi_all_velocities = max_x + max_v;
  }

  r.safety = check_safety(t, r.interval, normal);
  const long tail = std::min<long>(50, static_cast<long>(t.steps.size()));
  r.consensus = check_consensus(t, normal, 1e-6, std::max<long>(tail, 1));
  r.rate = rate_estimate(t, normal);
  const int depth = sc.mode == Mode::Sync ? 2 : sc.tau + 2;
  r.envelopes_are_monotone = envelopes_monotone(envelopes(t, normal, depth));
  if (sc.mode == Mode::Sync && !t.steps.empty() && !t.steps.front().filters.empty())
    r.realized_beta = realized_beta_sync(sc, t);
  return r;
}

json report_to_json(const RunReport& r) {
  json j;
  j["scenario"] = r.scenario_name;
  j["mode"] = r.mode == Mode::Sync ? "sync" : "async";
  j["safety_interval"] = {{"lo", r.interval.lo}, {"hi", r.interval.hi}};
  if (r.interval_hi_all_velocities)
    j["safety_interval"]["hi_all_velocities"] = *r.interval_hi_all_velocities;
  j["safety"]["ok"] = r.safety.ok;
  if (r.safety.first_violation)
    j["safety"]["first_violation"] = {{"k", r.safety.first_violation->first},
                                      {"agent", r.safety.first_violation->second + 1}};
  j["consensus"]["achieved"] = r.consensus.achieved;
  if (r.consensus.value) j["consensus"]["value"] = *r.consensus.value;
  if (r.consensus.step_of_convergence)
    j["consensus"]["step_of_convergence"] = *r.consensus.step_of_convergence;
  j["consensus"]["final_spread"] = r.consensus.final_spread;
  j["consensus"]["max_speed_tail"] = r.consensus.max_speed_tail;
  j["rate"] = {{"slope", r.rate.slope},
               {"r_squared", r.rate.r_squared},
               {"converging", r.rate.converging}};
  j["envelopes_monotone"] = r.envelopes_are_monotone;
  if (r.realized_beta) j["realized_beta"] = *r.realized_beta;
  j["aborted"] = r.aborted;
  if (r.aborted) j["abort_reason"] = r.abort_reason;
  return j;
}

namespace {

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plots position-vs-time curves from the trace CSV next to this script."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

stem = os.path.splitext(os.path.abspath(__file__))[0].removesuffix("_plot")
trace = stem + "_trace.csv"
out = stem + "_positions.png"

ks, cols = [], {}
with open(trace) as fh:
    reader = csv.DictReader(fh)
    xcols = [c for c in reader.fieldnames if c.startswith("x")]
    for row in reader:
        ks.append(int(row["k"]))
        for c in xcols:
            cols.setdefault(c, []).append(float(row[c]))

plt.figure(figsize=(7, 3.5))
for c in xcols:
    plt.plot(ks, cols[c], label=c)
plt.xlabel("k")
plt.ylabel("position")
plt.legend(loc="best", fontsize=8)
plt.tight_layout()
plt.savefig(out, dpi=150)
print(out)
)PY";

}  // namespace

RunOutputs write_run_outputs(const Scenario& sc, const Trace& t, const RunReport& r,
                             const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem = (fs::path(out_dir) / sc.name).string();

  RunOutputs out;
  out.trace_csv = stem + "_trace.csv";
  out.edge_log_csv = stem + "_edges.csv";
  out.report_json = stem + "_report.json";
  out.plot_script = stem + "_plot.py";

  {
    std::ofstream f(out.trace_csv);
    if (!f) throw ValidationError("cannot write " + out.trace_csv);
    write_trace_csv(t, f);
  }
  {
    std::ofstream f(out.edge_log_csv);
    if (!f) throw ValidationError("cannot write " + out.edge_log_csv);
    write_edge_log_csv(t, f);
  }
  {
    std::ofstream f(out.report_json);
    if (!f) throw ValidationError("cannot write " + out.report_json);
    f << report_to_json(r).dump(2) << "\n";
  }
  {
    std::ofstream f(out.plot_script);
    if (!f) throw ValidationError("cannot write " + out.plot_script);
    f << kPlotScript;
  }
  return out;
}

}  // namespace resim
