#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "resim/msr.hpp"

namespace resim {

/// Ring of the last tau+1 position vectors; slot age 0 is the current step.
class HistoryBuffer {
 public:
  HistoryBuffer(int n, int tau);

  /// Replicates x0 across all slots, then overlays explicit history rows
  /// (history[0] is the step -1 vector).
  void reset(const std::vector<double>& x0,
             const std::vector<std::vector<double>>& history = {});
  void push(const std::vector<double>& x);

  double at_age(int age, int agent) const;
  int tau() const { return tau_; }
  int n() const { return n_; }

 private:
  int n_ = 0;
  int tau_ = 0;
  std::size_t head_ = 0;  // slot holding age 0
  std::vector<std::vector<double>> slots_;
};

/// Sticky per-edge sample: the absolute delayed position last acquired, when
/// it was acquired and at what age. Holding it across non-update steps grows
/// its effective age by one per step.
struct HeldSample {
  double value = 0.0;
  long acquired_at = 0;
  int acquired_age = 0;

  int age(long k) const { return acquired_age + static_cast<int>(k - acquired_at); }
};

/// Mutable engine state threaded through async rounds.
struct AsyncEngineState {
  HistoryBuffer buffer;
  std::vector<std::map<int, HeldSample>> held;  // per agent: in-neighbor -> sample
  std::vector<FilterDecision> held_filters;

  AsyncEngineState(int n, int tau) : buffer(n, tau), held(n), held_filters(n) {}
};

/// One partially asynchronous round at step k. Updating normal agents pull
/// fresh delayed samples per the delay schedule and re-run the position
/// filter; non-updating agents reuse their held samples and held filter
/// decision while the velocity term stays current. Malicious agents apply
/// their strategies. All states then advance simultaneously and the buffer
/// rotates.
RoundResult async_round(const NetworkState& s, AsyncEngineState& es, const Digraph& g,
                        const DelaySchedule& delays, const UpdateSchedule& updates,
                        const SimParams& p, const AdversaryRuntime& adv, long k);

/// Runs the asynchronous engine over the scenario horizon (same divergence
/// contract as run_sync). Every normal agent performs a forced acquisition
/// at k = 0 so held samples are defined before its first scheduled update.
Trace run_async(const Scenario& sc);

/// Per-edge sample ages at one step; ages[i][j] is meaningful when (j, i) is
/// an edge of the accompanying graph.
using EdgeDelays = std::vector<std::vector<int>>;

/// Two-step propagation matrices for the delayed protocol, sized
/// n x (tau+1)n. Block ell of L_tau holds the weights used with age ell.
/// With Gamma[k] = [I 0] - (T^2/2) Ln_tau[k]:
///   Lambda1 = [R 0] + Gamma[k],
///   Lambda2 = -R Gamma[k-1] - T Q Ln_tau[k-1]  ( = -[R 0] - (T^2/2) Ln_tau[k-1] ),
/// where Ln_tau has malicious rows zeroed. Normal rows are nonnegative and
/// sum to one across [Lambda1 Lambda2] under the parameter window.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lambda_matrices(
    const Digraph& gk, const EdgeDelays& delays_k, const Digraph& gk_prev,
    const EdgeDelays& delays_prev, const SimParams& p, const std::vector<int>& malicious,
    int tau);

/// The blocking construction over build_proposition_graph(f): the middle
/// block oscillates between a and b with delays arranged so one outer block
/// always sees it at a and the other always at b. Defaults to T = 1/2,
/// alpha = 3 so that integer endpoints make the whole run exact in floating
/// point. Requires a < c < b.
Scenario build_proposition1_scenario(int f, double a, double b, double c, long horizon = 1000);

}  // namespace resim
