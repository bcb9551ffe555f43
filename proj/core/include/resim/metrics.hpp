#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "resim/dynamics.hpp"
#include "resim/trace.hpp"

namespace resim {

/// Position interval fixed by the normal agents' initial conditions; every
/// normal position must stay inside it at every step.
struct SafetyInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Interval from the step-0 normal states:
///   [min x0 + min{0, (T - alpha T^2/2) v0},  max x0 + max{0, ...}],
/// extrema taken over the normal entries.
SafetyInterval safety_interval_sync(const NetworkState& s0, const SimParams& p,
                                    const std::vector<int>& normal);

/// Delayed variant: the position extrema range over the whole initial
/// history z0 = [x(0), x(-1), ..., x(-tau)].
SafetyInterval safety_interval_async(const std::vector<std::vector<double>>& z0,
                                     const std::vector<double>& v0, const SimParams& p,
                                     const std::vector<int>& normal);

struct SafetyCheck {
  bool ok = true;
  std::optional<std::pair<long, int>> first_violation;  // (step, agent)
};

/// True iff every normal position at every recorded step lies in
/// [lo - 1e-9, hi + 1e-9].
SafetyCheck check_safety(const Trace& t, const SafetyInterval& s, const std::vector<int>& normal);

struct ConsensusVerdict {
  bool achieved = false;
  std::optional<double> value;
  std::optional<long> step_of_convergence;
  double final_spread = 0.0;
  double max_speed_tail = 0.0;
};

/// Achieved iff over the last `tail` recorded steps the normal position
/// spread and all normal speeds stay within tol. The agreed value is the
/// mean of the final normal positions.
ConsensusVerdict check_consensus(const Trace& t, const std::vector<int>& normal,
                                 double tol = 1e-6, long tail = 50);

/// Rolling extrema of normal positions over a trailing window of `depth`
/// steps (2 for synchronous runs, tau+2 for delayed runs), defined from
/// k = 1 on; steps before the trace start resolve through the prehistory.
struct EnvelopeSeries {
  long first_k = 1;
  std::vector<double> upper;
  std::vector<double> lower;
};

EnvelopeSeries envelopes(const Trace& t, const std::vector<int>& normal, int depth);

/// Upper envelope nonincreasing and lower nondecreasing, within slack.
bool envelopes_monotone(const EnvelopeSeries& e, double slack = 1e-12);

struct RateEstimate {
  double slope = 0.0;      // least-squares slope of log envelope gap per step
  double r_squared = 0.0;
  bool converging = false;
};

/// Fits log V(k), V = envelope gap at depth 2, over the decay segment
/// (before the gap reaches the numerical floor). Non-converging traces are
/// flagged and reported with a near-zero slope.
RateEstimate rate_estimate(const Trace& t, const std::vector<int>& normal);

/// 1-D clustering of the per-agent mean position over the last `tail`
/// steps: groups split at sorted gaps above `gap_threshold`.
struct ClusterSummary {
  int count = 0;
  double split_gap = 0.0;             // largest inter-cluster gap
  std::vector<double> centers;
  std::vector<int> sizes;
  double max_agent_wobble = 0.0;      // max per-agent drift over the tail
};

ClusterSummary cluster_positions(const Trace& t, const std::vector<int>& normal, long tail,
                                 double gap_threshold);

double spread_at(const Trace& t, long k, const std::vector<int>& normal);

}  // namespace resim
