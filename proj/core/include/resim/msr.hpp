#pragma once

#include <map>
#include <vector>

#include "resim/adversary.hpp"
#include "resim/dynamics.hpp"
#include "resim/filter.hpp"
#include "resim/graph.hpp"
#include "resim/scenario.hpp"
#include "resim/trace.hpp"

namespace resim {

/// Everything the engines need to evaluate misbehaving agents: the declared
/// model, instantiated strategies and the omniscience context (trace +
/// schedules).
struct AdversaryRuntime {
  const AdversaryModel* model = nullptr;
  const std::map<int, Strategy>* strategies = nullptr;
  const Trace* trace = nullptr;
  const UpdateSchedule* updates = nullptr;
  const DelaySchedule* delays = nullptr;
};

struct RoundResult {
  NetworkState state;
  std::vector<FilterDecision> filters;  // indexed by agent; agent == -1 for malicious rows
  ControlVector controls;
  std::vector<EdgeUse> edge_uses;
};

/// One synchronous round: every normal agent filters the relative positions
/// of its neighbors, zeroes the ignored weights and applies the relative
/// position control; malicious agents apply their strategies; then all
/// states advance simultaneously from the step-k snapshot.
RoundResult sync_round(const NetworkState& s, const Digraph& g, const SimParams& p,
                       const AdversaryRuntime& adv);

/// Runs the synchronous engine over the scenario horizon. A diverging state
/// (|x| > 1e9) stops the run early; the partial trace is returned with
/// `aborted` set instead of throwing.
Trace run_sync(const Scenario& sc);

inline constexpr double kDivergenceGuard = 1e9;

/// Instantiates the scenario's strategy table.
std::map<int, Strategy> make_strategies(const Scenario& sc);

}  // namespace resim
