#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "resim/graph.hpp"

namespace resim {

/// Sampling period T, velocity damping gain alpha, agent count n and the
/// assumed bound f on misbehaving agents.
struct SimParams {
  double T = 0.0;
  double alpha = 0.0;
  int n = 0;
  int f = 0;
};

/// True iff 1 + T^2/2 <= alpha*T <= 2 - T^2/2 (closed interval). T and alpha
/// must be positive.
bool validate_params(const SimParams& p);
void require_valid_params(const SimParams& p);

/// Positions are stored offset-adjusted (x_i - delta_i); raw positions are
/// recoverable by adding `offsets`.
struct NetworkState {
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<double> offsets;
  long step = 0;

  int n() const { return static_cast<int>(positions.size()); }
  static NetworkState make(std::vector<double> pos, std::vector<double> vel,
                           std::vector<double> offs = {});
};

struct ControlVector {
  std::vector<double> u;
};

/// One zero-order-hold step:
///   x <- x + T v + (T^2/2) u,  v <- v + T u,
/// applied identically to every agent. Throws NumericError naming the first
/// agent whose new state is non-finite.
NetworkState step_state(const NetworkState& s, const ControlVector& u, const SimParams& p);

/// Relative-position control for one agent over (weight, sample) pairs:
///   sum_j w_j (sample_j - x_i) - alpha v_i.
/// Both engines route their control evaluation through this helper so that
/// the degenerate asynchronous case reproduces the synchronous engine bit
/// for bit.
double control_from_samples(double x_i, double v_i,
                            std::span<const std::pair<double, double>> weighted_samples,
                            double alpha);

/// Unfiltered control over all graph neighbors; equals -L x - alpha v on
/// every row.
ControlVector nominal_control(const NetworkState& s, const Digraph& g, const SimParams& p);

/// Two-step position propagation matrices. With R = I - alpha*T*E and E the
/// indicator of normal agents, returns
///   Phi1 = R + I - (T^2/2) Ln[k],   Phi2 = -R - (T^2/2) Ln[k-1],
/// where Ln is the graph Laplacian with malicious rows zeroed. Rows indexed
/// by normal agents are nonnegative and sum to one whenever the parameter
/// window holds. Agent order is the natural one; rows of malicious agents
/// carry the double-integrator [2, -1] pattern instead.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> phi_matrices(const Digraph& gk,
                                                         const Digraph& gk_prev,
                                                         const SimParams& p,
                                                         const std::vector<int>& malicious);

}  // namespace resim
