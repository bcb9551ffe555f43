// resim: scenario runner, robustness checker and sweep driver.
//
// Exit codes: 0 ok, 2 validation failure, 3 numeric divergence.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "resim/asyncsim.hpp"
#include "resim/errors.hpp"
#include "resim/graph.hpp"
#include "resim/msr.hpp"
#include "resim/report.hpp"
#include "resim/scenario.hpp"
#include "resim/sweep.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

std::string default_out_dir() {
  if (const char* env = std::getenv("RESIM_OUT_DIR"); env && *env) return env;
  return ".";
}

resim::Scenario resolve_scenario(const std::string& arg) {
  if (std::filesystem::exists(arg)) return resim::load_scenario(arg);
  const auto names = resim::preset_names();
  for (const auto& name : names)
    if (name == arg) return resim::make_preset(name);
  throw resim::ValidationError("no scenario file or preset named '" + arg + "'");
}

int cmd_run(const std::string& scenario_arg, const std::string& out_dir) {
  resim::Scenario sc = resolve_scenario(scenario_arg);
  auto check = resim::validate_scenario(sc);
  for (const auto& w : check.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  resim::Trace trace = sc.mode == resim::Mode::Sync ? resim::run_sync(sc) : resim::run_async(sc);
  resim::RunReport report = resim::analyze_run(sc, trace);
  auto outputs = resim::write_run_outputs(sc, trace, report, out_dir);

  std::printf("scenario:  %s (%s, graph %s, horizon %ld)\n", sc.name.c_str(),
              sc.mode == resim::Mode::Sync ? "sync" : "async", sc.graph_desc.c_str(), sc.horizon);
  std::printf("interval:  [%.4f, %.4f]", report.interval.lo, report.interval.hi);
  if (report.interval_hi_all_velocities)
    std::printf("  (hi with all velocities: %.4f)", *report.interval_hi_all_velocities);
  std::printf("\n");
  std::printf("safety:    %s", report.safety.ok ? "ok" : "violated");
  if (report.safety.first_violation)
    std::printf(" (first at k=%ld, agent %d)", report.safety.first_violation->first,
                report.safety.first_violation->second + 1);
  std::printf("\n");
  if (report.consensus.achieved)
    std::printf("consensus: yes, value %.6f (from step %ld)\n", *report.consensus.value,
                *report.consensus.step_of_convergence);
  else
    std::printf("consensus: no (final spread %.6g)\n", report.consensus.final_spread);
  std::printf("rate:      slope %.6g per step, r^2 %.4f%s\n", report.rate.slope,
              report.rate.r_squared, report.rate.converging ? "" : " (not converging)");
  std::printf("outputs:   %s\n           %s\n           %s\n           %s\n",
              outputs.trace_csv.c_str(), outputs.edge_log_csv.c_str(),
              outputs.report_json.c_str(), outputs.plot_script.c_str());
  if (trace.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", trace.abort_reason.c_str());
    return kExitNumeric;
  }
  return 0;
}

resim::Digraph graph_from_cli(const std::string& file, int complete_n, int proposition_f,
                              bool example5) {
  const int sources = (!file.empty()) + (complete_n > 0) + (proposition_f > 0) + example5;
  if (sources != 1)
    throw resim::ValidationError("pick exactly one of --file/--complete/--proposition/--example5");
  if (!file.empty()) return resim::load_edge_list(file);
  if (complete_n > 0) return resim::build_complete(complete_n);
  if (proposition_f > 0) return resim::build_proposition_graph(proposition_f);
  return resim::example_graph_5();
}

int cmd_check_graph(const resim::Digraph& g, int r, int s, bool sweep, int guard,
                    const std::string& dot_path) {
  std::printf("graph: %d nodes, %d edges, gamma %.4g, spanning tree %s\n", g.n(), g.edge_count(),
              g.gamma(), resim::has_directed_spanning_tree(g) ? "yes" : "no");
  if (!dot_path.empty()) {
    std::ofstream out(dot_path);
    if (!out) throw resim::ValidationError("cannot write " + dot_path);
    out << resim::to_dot(g);
    std::printf("dot written to %s\n", dot_path.c_str());
  }
  if (sweep) {
    std::printf("maximal r per s:\n");
    for (int sv = 1; sv < g.n(); ++sv) {
      int best = -1;
      for (int rv = 0; rv < g.n(); ++rv) {
        if (resim::is_rs_robust(g, rv, sv, guard).holds)
          best = rv;
        else
          break;
      }
      std::printf("  s=%d: max r = %d\n", sv, best);
    }
    return 0;
  }
  auto rep = resim::is_rs_robust(g, r, s, guard);
  std::printf("(%d,%d)-robust: %s\n", r, s, rep.holds ? "yes" : "no");
  if (!rep.holds && rep.witness) {
    std::printf("witness pair: S1={");
    for (int v : rep.witness->first) std::printf(" %d", v + 1);
    std::printf(" } S2={");
    for (int v : rep.witness->second) std::printf(" %d", v + 1);
    std::printf(" }\n");
  }
  return 0;
}

int cmd_sweep(const std::string& file, const std::string& out_csv, int workers) {
  resim::SweepResult result = resim::run_sweep_file(file, workers);
  const std::string csv = result.to_csv();
  std::ofstream out(out_csv);
  if (!out) throw resim::ValidationError("cannot write " + out_csv);
  out << csv;
  std::fputs(csv.c_str(), stdout);
  std::printf("rows: %zu, failures: %d -> %s\n", result.rows.size(), result.failures,
              out_csv.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient consensus simulator for sampled-data double-integrator networks"};
  app.require_subcommand(1);

  // run
  std::string scenario_arg, out_dir = default_out_dir();
  auto* run = app.add_subcommand("run", "Run a scenario file or preset");
  run->add_option("scenario", scenario_arg, "Scenario JSON file or preset name")->required();
  run->add_option("--out-dir", out_dir, "Output directory (or $RESIM_OUT_DIR)");

  // check-graph
  std::string graph_file, dot_path;
  int complete_n = 0, proposition_f = 0, r = 1, s = 1, guard = resim::kDefaultEnumGuard;
  bool example5 = false, sweep_mode = false;
  auto* cg = app.add_subcommand("check-graph", "Decide (r,s)-robustness of a graph");
  cg->add_option("--file", graph_file, "Edge-list file (n, then 'j i weight' lines, 1-indexed)");
  cg->add_flag("--example5", example5, "Use the shipped 5-node example graph");
  cg->add_option("--complete", complete_n, "Use the complete graph on N nodes");
  cg->add_option("--proposition", proposition_f, "Use the four-block family for this f");
  cg->add_option("--r", r, "r to test");
  cg->add_option("--s", s, "s to test (default 1)");
  cg->add_flag("--sweep", sweep_mode, "Report the maximal r for every s");
  cg->add_option("--guard", guard, "Enumeration guard on the node count");
  cg->add_option("--dot", dot_path, "Also write a DOT rendering here");

  // sweep
  std::string sweep_file, sweep_out;
  int workers = 0;
  auto* sw = app.add_subcommand("sweep", "Run a parameter grid over a scenario template");
  sw->add_option("spec", sweep_file, "Sweep JSON: {template, grid}")->required();
  sw->add_option("--out", sweep_out, "Summary CSV path");
  sw->add_option("--workers", workers, "Worker threads (default: hardware)");

  // presets
  std::string preset_name, preset_out;
  auto* pr = app.add_subcommand("presets", "List or export the built-in scenarios");
  auto* prl = pr->add_subcommand("list", "List preset names");
  auto* prs = pr->add_subcommand("show", "Print a preset as scenario JSON");
  prs->add_option("name", preset_name, "Preset name")->required();
  prs->add_option("--out", preset_out, "Write to a file instead of stdout");
  pr->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario_arg, out_dir);
    if (*cg)
      return cmd_check_graph(graph_from_cli(graph_file, complete_n, proposition_f, example5), r,
                             s, sweep_mode, guard, dot_path);
    if (*sw) {
      if (sweep_out.empty())
        sweep_out = (std::filesystem::path(out_dir) / "sweep_summary.csv").string();
      return cmd_sweep(sweep_file, sweep_out, workers);
    }
    if (*pr) {
      if (*prl) {
        for (const auto& name : resim::preset_names()) std::printf("%s\n", name.c_str());
        return 0;
      }
      if (*prs) {
        resim::Scenario sc = resim::make_preset(preset_name);
        const std::string text = resim::scenario_to_json(sc).dump(2) + "\n";
        if (preset_out.empty()) {
          std::fputs(text.c_str(), stdout);
        } else {
          std::ofstream out(preset_out);
          if (!out) throw resim::ValidationError("cannot write " + preset_out);
          out << text;
        }
        return 0;
      }
    }
  } catch (const resim::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const resim::SizeGuardError& e) {
    std::fprintf(stderr, "size guard: %s\n", e.what());
    return kExitValidation;
  } catch (const resim::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return 0;
}
