#include "resim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "resim/asyncsim.hpp"
#include "resim/errors.hpp"
#include "resim/msr.hpp"
#include "resim/report.hpp"
#include "resim/scenario.hpp"

namespace resim {

using nlohmann::json;

std::string SweepResult::to_csv() const {
  std::string out = "id";
  for (const auto& name : axis_names) out += "," + name;
  out += ",error,consensus,value,safety,interval_lo,interval_hi,slope\n";
  char buf[64];
  int id = 0;
  for (const auto& row : rows) {
    out += std::to_string(id++);
    for (const auto& cell : row.cell_values) out += "," + cell;
    if (row.failed) {
      std::string msg = row.error;
      for (auto& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      out += "," + msg + ",,,,,,\n";
      continue;
    }
    out += ",," + std::string(row.consensus ? "true" : "false");
    std::snprintf(buf, sizeof buf, ",%.6g", row.value);
    out += buf;
    out += std::string(",") + (row.safety ? "true" : "false");
    std::snprintf(buf, sizeof buf, ",%.6g,%.6g,%.6g\n", row.interval_lo, row.interval_hi,
                  row.slope);
    out += buf;
  }
  return out;
}

namespace {

SweepRow run_one(const json& instance, const std::string& base_dir) {
  SweepRow row;
  try {
    Scenario sc = scenario_from_json(instance, base_dir);
    Trace t = sc.mode == Mode::Sync ? run_sync(sc) : run_async(sc);
    RunReport r = analyze_run(sc, t);
    row.consensus = r.consensus.achieved;
    row.value = r.consensus.value.value_or(0.0);
    row.safety = r.safety.ok;
    row.interval_lo = r.interval.lo;
    row.interval_hi = r.interval.hi;
    row.slope = r.rate.slope;
    if (t.aborted) {
      row.failed = true;
      row.error = "aborted: " + t.abort_reason;
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepResult run_sweep(const json& scenario_template, const std::vector<SweepAxis>& axes,
                      const std::string& base_dir, int workers) {
  SweepResult result;
  for (const auto& axis : axes) {
    result.axis_names.push_back(axis.pointer);
    if (axis.values.empty()) return result;  // empty axis: empty grid
  }

  // materialize the grid in row-major order (last axis fastest)
  std::size_t total = axes.empty() ? 0 : 1;
  for (const auto& axis : axes) total *= axis.values.size();

  std::vector<json> instances;
  std::vector<std::vector<std::string>> cells;
  instances.reserve(total);
  cells.reserve(total);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    std::vector<std::size_t> pick(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      pick[a] = rem % axes[a].values.size();
      rem /= axes[a].values.size();
    }
    json inst = scenario_template;
    std::vector<std::string> cell;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      inst[json::json_pointer(axes[a].pointer)] = axes[a].values[pick[a]];
      cell.push_back(axes[a].values[pick[a]].dump());
    }
    instances.push_back(std::move(inst));
    cells.push_back(std::move(cell));
  }

  if (workers <= 0)
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(instances.size()));

  result.rows.resize(instances.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < instances.size();) {
        result.rows[i] = run_one(instances[i], base_dir);
        result.rows[i].cell_values = cells[i];
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& row : result.rows)
    if (row.failed) ++result.failures;
  return result;
}

SweepResult run_sweep_file(const std::string& path, int workers) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sweep file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("sweep json parse failure: " + std::string(e.what()));
  }

  json templ = j.at("template");
  if (templ.is_string()) templ = scenario_to_json(make_preset(templ.get<std::string>()));

  std::vector<SweepAxis> axes;
  if (j.contains("grid"))
    for (const auto& [pointer, values] : j.at("grid").items()) {
      SweepAxis axis;
      axis.pointer = pointer;
      for (const auto& v : values) axis.values.push_back(v);
      axes.push_back(std::move(axis));
    }
  return run_sweep(templ, axes, std::filesystem::path(path).parent_path().string(), workers);
}

}  // namespace resim
