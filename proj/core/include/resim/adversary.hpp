#pragma once

#include <functional>
#include <map>
#include <vector>

#include "resim/dynamics.hpp"
#include "resim/graph.hpp"
#include "resim/schedules.hpp"
#include "resim/trace.hpp"

namespace resim {

enum class AdversaryKind { FTotal, FLocal };

/// Declared misbehavior model: which agents are malicious and the bound the
/// normal agents assume.
struct AdversaryModel {
  AdversaryKind kind = AdversaryKind::FTotal;
  int f = 0;
  std::vector<int> malicious;  // sorted agent indices
};

/// f-total: |M| <= f. f-local: every normal agent has at most f malicious
/// in-neighbors. Throws on out-of-range indices.
bool validate_model(const Digraph& g, const AdversaryModel& m);

/// What a strategy may look at: the trace so far (state at `k` is the last
/// record), the schedules, and the simulation parameters. Misbehaving agents
/// are omniscient about update times and delays.
struct StrategyContext {
  const Trace& trace;
  const UpdateSchedule* updates = nullptr;
  const DelaySchedule* delays = nullptr;
  const SimParams& params;
  long k = 0;
  int agent = -1;
};

using Strategy = std::function<double(const StrategyContext&)>;

/// Keeps the agent's position at `position`. From a stationary start at the
/// held point the control is identically zero; from a moving start the
/// position is re-pinned and the velocity brought to zero within two steps
/// (a single scalar input cannot do both at once).
Strategy strategy_hold(double position);

/// Drives the position to `low` at even steps and `high` at odd steps by
/// solving the position row of the step map for the input each step.
Strategy strategy_oscillate(double low, double high);

struct ScriptEntry {
  enum class Kind { RawU, Target };
  Kind kind = Kind::RawU;
  double value = 0.0;
};

/// Plays back a step-indexed table of raw inputs or position targets.
/// Missing entries raise ScheduleError.
Strategy strategy_scripted(std::map<long, ScriptEntry> table);

/// Scenario-file representation of a strategy.
struct StrategySpec {
  std::string type;  // "hold" | "oscillate" | "script"
  double position = 0.0;
  double low = 0.0, high = 0.0;
  std::map<long, ScriptEntry> script;
};

Strategy make_strategy(const StrategySpec& spec);

}  // namespace resim
