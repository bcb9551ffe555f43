#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "resim/adversary.hpp"
#include "resim/dynamics.hpp"
#include "resim/graph.hpp"
#include "resim/schedules.hpp"

namespace resim {

enum class Mode { Sync, Async };

/// Full experiment description. Scenario files are JSON with a versioned
/// schema; agents and edge endpoints are 1-indexed in files and 0-indexed
/// here.
struct Scenario {
  int schema_version = 1;
  std::string name;
  Mode mode = Mode::Sync;
  SimParams params;

  Digraph graph;
  std::string graph_desc;

  std::vector<double> x0;
  std::vector<double> v0;
  std::vector<double> offsets;

  AdversaryModel adversary;
  std::map<int, StrategySpec> strategies;

  // async only
  int tau = 0;
  UpdateSchedule updates;
  DelaySchedule delays;
  std::vector<std::vector<double>> history;  // [0] = x(-1), ...

  long horizon = 0;
  std::uint64_t seed = 0;

  std::vector<int> normal_set() const;
  NetworkState initial_state() const;
};

struct ScenarioCheck {
  std::vector<std::string> warnings;
};

/// Hard-fails (ValidationError) on parameter-window violations, model
/// violations, shape mismatches, non-finite data, or schedules that cannot
/// cover the horizon. Returns warnings for soft issues, e.g. update gaps
/// that let a held sample age beyond tau.
ScenarioCheck validate_scenario(const Scenario& sc);

Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir = "");
nlohmann::json scenario_to_json(const Scenario& sc);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

/// Named, frozen experiment setups.
std::vector<std::string> preset_names();
Scenario make_preset(const std::string& name);

}  // namespace resim
