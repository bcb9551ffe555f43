#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace resim {

/// One axis of a sweep grid: a JSON pointer into the scenario template plus
/// the values to substitute.
struct SweepAxis {
  std::string pointer;
  std::vector<nlohmann::json> values;
};

struct SweepRow {
  std::vector<std::string> cell_values;  // one per axis, compact JSON
  bool failed = false;
  std::string error;
  bool consensus = false;
  double value = 0.0;
  bool safety = false;
  double interval_lo = 0.0, interval_hi = 0.0;
  double slope = 0.0;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;
  int failures = 0;

  std::string to_csv() const;
};

/// Runs the cartesian product of the axes over the scenario template; rows
/// come back in grid order regardless of execution interleaving. Individual
/// run failures are recorded and the sweep continues.
SweepResult run_sweep(const nlohmann::json& scenario_template, const std::vector<SweepAxis>& axes,
                      const std::string& base_dir = "", int workers = 0);

/// Parses a sweep file: {"template": <scenario object or preset name>,
/// "grid": {"/params/f": [0, 1], ...}}.
SweepResult run_sweep_file(const std::string& path, int workers = 0);

}  // namespace resim
